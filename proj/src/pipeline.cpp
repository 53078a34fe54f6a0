#include "katok/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "katok/errors.hpp"

namespace katok {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void require_grid(const std::vector<long>& grid, const std::string& name) {
    require(!grid.empty(), name + " must be a nonempty list");
    for (long v : grid) require(v >= 1, name + " entries must be >= 1");
}

// Everything the stages share; built once per run.
struct Context {
    SystemSpec system;
    OrbitSegment orbit;
    LyapunovSpectrum spectrum;
    SplittingField field;
    PesinBlock block;
    RectangleCover cover;
    Partition partition;
    TestBasis basis;
    long K = 0;
    double r0 = 0.0;
    SelectionResult gamma_j, gamma_b_phiu, gamma_e, gamma_r;
    std::vector<std::pair<std::string, SelectionResult>> gamma_b;
    std::vector<long> gamma_prime;
    long n_final = 0;
    long threshold_required = 0;
};

class StageClock {
  public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

    template <typename F>
    auto run(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                record(name, t0);
            } else {
                auto value = body();
                record(name, t0);
                return value;
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const StageFailureError&) {
            throw;
        } catch (const Error& err) {
            throw StageFailureError("stage '" + name + "' failed (" + err.what() + ")");
        }
    }

  private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        out_.push_back({name, std::chrono::duration<double, std::milli>(dt).count()});
    }

    std::vector<StageTiming>& out_;
};

std::vector<long> intersect_sorted(const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Gamma_B for the geometric potential -phi^u = log|Jac df restricted to E^u|,
// via the splitting field's prefix sums instead of a pointwise observable.
SelectionResult select_gamma_b_geometric(const SplittingField& field, double delta, double r,
                                         const std::vector<long>& n_grid) {
    const long lo = field.valid_from;
    const long max_n = *std::max_element(n_grid.begin(), n_grid.end());
    const long hi = field.valid_to - max_n;
    const double mean = (field.log_expansion_prefix[static_cast<std::size_t>(field.valid_to)] -
                         field.log_expansion_prefix[static_cast<std::size_t>(lo)]) /
                        static_cast<double>(field.valid_to - lo);
    SelectionResult res =
        egorov_selection(std::max<long>(0, hi - lo), n_grid, delta, r,
                         [&](long i, long n) { return std::abs(field.psi(lo + i, n) - mean) <= r; });
    for (long& i : res.members) i += lo;
    return res;
}

Context build_context(const PipelineConfig& config, const OrbitSegment& orbit,
                      std::vector<StageTiming>& timing, bool nesting) {
    StageClock clock(timing);
    Context ctx;
    ctx.system = make_system(config.system, config.params);
    ctx.orbit = orbit;

    clock.run("spectrum", [&] {
        ctx.spectrum = lyapunov_spectrum_qr(ctx.system, ctx.orbit);
        ctx.field = compute_splitting_field(ctx.system, ctx.orbit);
    });

    const double chi = ctx.spectrum.chi;
    const double h_est = ctx.spectrum.chi_plus_sum;
    require(config.r < std::min(h_est, chi / 3.0),
            "r must lie in (0, min{h estimate, chi/3}) = (0, " +
                std::to_string(std::min(h_est, chi / 3.0)) + ")");
    require(config.gamma < chi / 3.0,
            "gamma must lie in (0, chi/3) = (0, " + std::to_string(chi / 3.0) + ")");
    if (nesting)
        require(config.e_target < h_est,
                "e_target must lie in [0, h estimate) = [0, " + std::to_string(h_est) + ")");
    else
        require(config.e_target > 0.0 && config.e_target <= h_est,
                "e_target must lie in (0, h estimate] = (0, " + std::to_string(h_est) + "]");

    clock.run("pesin-block", [&] {
        std::vector<long> indices;
        const long lo = ctx.field.valid_from + config.horizon;
        const long hi = ctx.field.valid_to - config.horizon - 100;
        for (long i = lo; i < hi; ++i) indices.push_back(i);
        const auto est =
            estimate_c1_c2(ctx.field, ctx.spectrum.chi, config.gamma, config.horizon, indices);
        ctx.block = pesin_block(est, config.block_level);
    });

    clock.run("cover", [&] {
        ctx.cover = rectangle_cover(ctx.system, ctx.orbit, ctx.field, ctx.spectrum, ctx.block,
                                    config.gamma, config.rho0, config.truncation, config.epsilon1,
                                    config.rho, config.lipschitz);
        // Cells of diameter cover.rho: members of a center's cell stay inside
        // B(center, rho), hence inside the rectangle.
        ctx.partition = grid_partition(ctx.system.domain, 2.0 * ctx.cover.rho);
    });

    clock.run("basis", [&] {
        long k_formula = 1;
        while (std::exp2(static_cast<double>(-k_formula + 1)) >= config.r / 2.0) ++k_formula;
        ctx.basis = trig_basis(std::max(config.basis_terms, k_formula + 2));
        const KAndR0 kr = choose_K_r0(config.r, ctx.basis);
        ctx.K = kr.K;
        ctx.r0 = kr.r0;
    });

    clock.run("gamma-j", [&] {
        ctx.gamma_j = select_gamma_j(ctx.field, ctx.spectrum.chi_plus_sum, config.delta,
                                     config.selection_r, config.selection_grid);
    });

    clock.run("gamma-b", [&] {
        for (long i = 0; i < ctx.K; ++i) {
            const Observable& psi = ctx.basis.members[static_cast<std::size_t>(i)];
            ctx.gamma_b.emplace_back(psi.name,
                                     select_gamma_b(ctx.orbit, psi, config.delta,
                                                    config.selection_r, config.selection_grid));
        }
        ctx.gamma_b_phiu = select_gamma_b_geometric(ctx.field, config.delta, config.selection_r,
                                                    config.selection_grid);
    });

    clock.run("gamma-prime", [&] {
        ctx.gamma_prime = intersect_sorted(ctx.block.members, ctx.gamma_j.members);
        for (const auto& [name, res] : ctx.gamma_b)
            ctx.gamma_prime = intersect_sorted(ctx.gamma_prime, res.members);
        ctx.gamma_prime = intersect_sorted(ctx.gamma_prime, ctx.gamma_b_phiu.members);
        if (ctx.gamma_prime.empty())
            throw SelectionFailureError("Gamma' is empty; relax selection_r or delta");
    });

    clock.run("gamma-r", [&] {
        ctx.gamma_r = select_gamma_r(ctx.orbit, ctx.partition, ctx.gamma_prime, config.delta,
                                     config.return_ratio, config.recurrence_grid);
    });

    clock.run("gamma-e", [&] {
        std::vector<long> probes;
        const long count = std::min<long>(config.gamma_e_probes,
                                          static_cast<long>(ctx.gamma_prime.size()));
        const long max_n = *std::max_element(config.gamma_e_grid.begin(), config.gamma_e_grid.end());
        std::vector<long> eligible;
        for (long idx : ctx.gamma_prime)
            if (idx + max_n < ctx.orbit.length()) eligible.push_back(idx);
        if (static_cast<long>(eligible.size()) < count)
            throw SelectionFailureError("too few Gamma' members for the Gamma_E probes");
        const long stride = std::max<long>(1, static_cast<long>(eligible.size()) / count);
        for (long k = 0; k < count; ++k) probes.push_back(eligible[static_cast<std::size_t>(k * stride)]);
        // Brin-Katok mass window around the entropy estimate, certified on the
        // probe subsample; Gamma' then stands in for Gamma' intersect Gamma_E.
        ctx.gamma_e = select_gamma_e(ctx.system, ctx.orbit, probes, config.delta, h_est,
                                     config.selection_r, config.epsilon1, config.gamma_e_grid);
    });

    clock.run("n-escalation", [&] {
        long required = std::max(ctx.gamma_j.threshold_n, ctx.gamma_b_phiu.threshold_n);
        for (const auto& [name, res] : ctx.gamma_b) required = std::max(required, res.threshold_n);
        required = std::max(required, ctx.gamma_e.threshold_n);
        required = std::max(required,
                            static_cast<long>(std::ceil(
                                std::log(static_cast<double>(ctx.cover.size())) / config.r)));
        required = std::max(required,
                            static_cast<long>(std::ceil(
                                std::abs(std::log(1.0 - 5.0 * config.delta)) / config.r)));
        ctx.threshold_required = required;
        long n = config.n;
        while (n < required) {
            n *= 2;
            require(n <= config.n_cap, "n escalation passed n_cap = " +
                                           std::to_string(config.n_cap) + " chasing threshold " +
                                           std::to_string(required));
        }
        ctx.n_final = n;
    });

    return ctx;
}

void fill_context_report(RunReport& report, const Context& ctx) {
    report.chi = ctx.spectrum.chi;
    report.chi_plus_sum = ctx.spectrum.chi_plus_sum;
    report.h_estimate = ctx.spectrum.chi_plus_sum;
    report.n_final = ctx.n_final;
    report.threshold_required = ctx.threshold_required;
    report.gamma_j = ctx.gamma_j;
    report.gamma_b_phiu = ctx.gamma_b_phiu;
    report.gamma_e = ctx.gamma_e;
    report.gamma_r = ctx.gamma_r;
    report.gamma_b = ctx.gamma_b;
    report.gamma_prime_size = static_cast<long>(ctx.gamma_prime.size());
    report.block_size = static_cast<long>(ctx.block.members.size());
    report.block_fraction = ctx.block.fraction;
    report.cover_size = ctx.cover.size();
    report.cover_rho = ctx.cover.rho;
    report.cover_lambda = ctx.cover.lambda;
    report.partition_cells = ctx.partition.cell_count();
    report.K = ctx.K;
    report.r0 = ctx.r0;
}

std::vector<long> candidate_pool(const Context& ctx, long window_hi, long cap) {
    const long limit = std::min(ctx.orbit.length(), ctx.field.valid_to);
    std::vector<long> eligible;
    for (long idx : ctx.gamma_prime)
        if (idx >= ctx.field.valid_from && idx + window_hi < limit) eligible.push_back(idx);
    if (eligible.empty()) throw SelectionFailureError("no Gamma' member fits the return window");
    const long stride =
        std::max<long>(1, (static_cast<long>(eligible.size()) + cap - 1) / cap);
    std::vector<long> out;
    for (std::size_t k = 0; k < eligible.size(); k += static_cast<std::size_t>(stride))
        out.push_back(eligible[k]);
    return out;
}

void assert_separation_certificate(const Context& ctx, const HorseshoeDescription& desc, long n,
                                   double epsilon) {
    for (std::size_t a = 0; a < desc.symbol_points.size(); ++a)
        for (std::size_t b = a + 1; b < desc.symbol_points.size(); ++b)
            if (bowen_ball_contains(ctx.system, desc.symbol_points[a], desc.symbol_points[b], n,
                                    epsilon))
                throw StageFailureError("symbol pair lost Bowen separation after assembly");
}

NestedSequence nest_core(const Context& ctx, double e, long depth, const PipelineConfig& config,
                         std::vector<StageTiming>& timing) {
    StageClock clock(timing);
    NestedSequence seq;
    seq.e = e;

    // One shallow separated set feeds every stage: the stage entropies
    // log(N)/m with m in [2, m_max_nest) need dense rectangle returners, so
    // the separation scale is epsilon_nest rather than epsilon.
    const std::vector<long> pool = clock.run("nest-candidates", [&] {
        const std::vector<long> cands = candidate_pool(ctx, config.m_max_nest,
                                                       config.nest_max_candidates);
        return greedy_separated_set(ctx.system, ctx.orbit, cands, 2, config.epsilon_nest).indices;
    });

    // Returners per (cover rectangle, return time): x and f^k(x) both inside
    // the rectangle. The rectangle itself is the catchment — partition cells
    // are far too small here, since the usable symbols per return time are
    // capped by the period-k points the region contains. One shared base
    // rectangle keeps the stages nested.
    std::unordered_map<long, std::map<long, std::vector<long>>> members;  // center -> k -> idx
    clock.run("nest-returners", [&] {
        for (long idx : pool) {
            const Point& p = ctx.orbit.points[static_cast<std::size_t>(idx)];
            for (long c = 0; c < ctx.cover.size(); ++c) {
                const Rectangle& rect = ctx.cover.rectangles[static_cast<std::size_t>(c)];
                if (!rect.contains(ctx.system.domain, p)) continue;
                for (long k = 2; k < config.m_max_nest; ++k)
                    if (rect.contains(ctx.system.domain,
                                      ctx.orbit.points[static_cast<std::size_t>(idx + k)]))
                        members[c][k].push_back(idx);
            }
        }
        return 0;
    });
    if (members.empty())
        throw StageFailureError("nesting: no returner lands in any cover rectangle");
    // Score rectangles by usable symbols per return time (capped: strips near
    // the same period-k point overlap, so a glut at one k saturates).
    long base = -1, best_total = 0;
    for (const auto& [center, by_k] : members) {
        long total = 0;
        for (const auto& [k, v] : by_k) total += std::min<long>(static_cast<long>(v.size()), 64);
        if (total > best_total || (total == best_total && (base < 0 || center < base))) {
            base = center;
            best_total = total;
        }
    }

    // Disjoint-strip availability per return time, probed once and cached.
    std::map<long, std::vector<long>> kept_by_m;
    auto kept_for = [&](long m, double r_stage) -> const std::vector<long>& {
        auto it = kept_by_m.find(m);
        if (it != kept_by_m.end()) return it->second;
        std::vector<long> kept;
        const auto mem = members[base].find(m);
        if (mem != members[base].end() && mem->second.size() >= 2) {
            try {
                const HorseshoeDescription probe =
                    assemble_horseshoe(ctx.system, ctx.orbit, ctx.field, ctx.cover, base,
                                       mem->second, m, r_stage, config.trace_grid);
                kept = probe.symbol_indices;
            } catch (const ComponentOverlapError&) {
            } catch (const OutOfRangeError&) {
            }
        }
        return kept_by_m.emplace(m, std::move(kept)).first->second;
    };

    const EmpiricalMeasure mu = EmpiricalMeasure::from_orbit(ctx.orbit);
    double h_prev = ctx.spectrum.chi_plus_sum;
    const Rectangle& base_rect = ctx.cover.rectangles[static_cast<std::size_t>(base)];

    for (long s = 1; s <= depth; ++s) {
        const double zeta_prev = h_prev - e;
        if (zeta_prev <= 0.0)
            throw StageFailureError("nesting stage " + std::to_string(s) +
                                    ": no entropy left above e");
        const double e_s = e + std::exp2(static_cast<double>(-(s + 2))) * zeta_prev;
        const double r_s = 0.99 * std::exp2(static_cast<double>(-(s + 1))) * zeta_prev;
        // The stage entropy must sit inside the verifier's band (e_s - r_s,
        // e_s + r_s] as well as the nesting window with its slack.
        const double hi = std::min(
            e_s + r_s, e + std::exp2(static_cast<double>(-(s + 1))) * zeta_prev + config.tol_nest);

        long best_m = -1, best_n_symbols = 0;
        double best_h = 0.0;
        for (long m = 2; m < config.m_max_nest; ++m) {
            const std::vector<long>& kept = kept_for(m, r_s);
            for (long N = 2; N <= static_cast<long>(kept.size()); ++N) {
                const double h = std::log(static_cast<double>(N)) / static_cast<double>(m);
                if (h <= e + 1e-12 || h > hi || h >= h_prev - 1e-12) continue;
                if (h > best_h + 1e-12) {
                    best_h = h;
                    best_m = m;
                    best_n_symbols = N;
                }
            }
        }
        if (best_m < 0)
            throw StageFailureError("nesting stage " + std::to_string(s) +
                                    ": no admissible (N, m) in the window (e, " +
                                    std::to_string(hi) + ")");

        const std::vector<long>& kept = kept_for(best_m, r_s);
        const std::vector<long> symbols(kept.begin(), kept.begin() + best_n_symbols);
        NestedStage stage;
        stage.desc = clock.run("nest-stage-" + std::to_string(s), [&] {
            HorseshoeDescription d =
                assemble_horseshoe(ctx.system, ctx.orbit, ctx.field, ctx.cover, base, symbols,
                                   best_m, r_s, config.trace_grid);
            d.n = 2;
            d.epsilon = config.epsilon_nest;
            Theorem1Config vcfg;
            vcfg.e_target = e_s;
            vcfg.r = r_s;
            vcfg.delta = config.delta;
            vcfg.chi_plus_sum = ctx.spectrum.chi_plus_sum;
            vcfg.weak_star_terms = ctx.K;
            vcfg.proximity_samples = config.proximity_samples;
            verify_theorem1(ctx.system, d, ctx.orbit, ctx.field, ctx.basis, vcfg);
            return d;
        });
        stage.e_i = e_s;
        stage.r_i = r_s;
        stage.achieved = stage.desc.entropy;
        stage.zeta = stage.achieved - e;
        stage.contained = true;
        for (const Point& p : stage.desc.symbol_points)
            stage.contained = stage.contained && base_rect.contains(ctx.system.domain, p);
        if (!stage.contained)
            throw StageFailureError("nesting stage " + std::to_string(s) +
                                    ": symbol point left the base rectangle");
        seq.stages.push_back(std::move(stage));
        h_prev = best_h;
    }
    return seq;
}

}  // namespace

void PipelineConfig::validate() const {
    require(!system.empty(), "system must name a built-in map");
    require(orbit_length >= 1000, "orbit_length must be at least 1000");
    require(burn_in >= 0, "burn_in must be nonnegative");
    require(delta > 0.0 && delta < 0.2, "delta must lie in (0, 1/5)");
    require(r > 0.0 && r < 1.0, "r must lie in (0, 1) and below chi/3 at run time");
    require(gamma > 0.0, "gamma must be positive and below chi/3 at run time");
    require(e_target >= 0.0, "e_target must be nonnegative");
    require(epsilon > 0.0 && epsilon < epsilon1 && epsilon1 < epsilon0,
            "scales must satisfy 0 < epsilon < epsilon1 < epsilon0");
    require(rho0 > 0.0, "rho0 must be positive");
    require(rho > 0.0 && rho < rho0, "rho must lie in (0, rho0)");
    require(lipschitz > 0.0, "lipschitz must be positive");
    require(truncation >= 1, "truncation must be >= 1");
    require(horizon >= 1, "horizon must be >= 1");
    require(block_level >= 1, "block_level must be >= 1");
    require(n >= 1, "n must be >= 1");
    require(n_cap >= n, "n_cap must be >= n");
    require(return_ratio > 0.0, "return_ratio must be positive");
    require(selection_r > 0.0 && selection_r < 1.0, "selection_r must lie in (0, 1)");
    require_grid(selection_grid, "selection_grid");
    require_grid(gamma_e_grid, "gamma_e_grid");
    require_grid(recurrence_grid, "recurrence_grid");
    require(max_candidates >= 100, "max_candidates must be >= 100");
    require(gamma_e_probes >= 30, "gamma_e_probes must be >= 30");
    require(basis_terms >= 1, "basis_terms must be >= 1");
    require(proximity_samples >= 1, "proximity_samples must be >= 1");
    require(trace_grid >= 2, "trace_grid must be >= 2");
    require(depth >= 1, "depth must be >= 1");
    require(tol_nest > 0.0, "tol_nest must be positive");
    require(epsilon_nest > 0.0 && epsilon_nest < epsilon,
            "epsilon_nest must lie in (0, epsilon)");
    require(m_max_nest >= 3, "m_max_nest must be >= 3");
    require(nest_max_candidates >= 1000, "nest_max_candidates must be >= 1000");
}

RunReport run_extract(const PipelineConfig& config) {
    config.validate();
    require(config.e_target > 0.0, "e_target must be positive for extraction");
    RunReport report;
    report.config = config;
    report.n_initial = config.n;
    StageClock clock(report.timing);

    const OrbitSegment orbit = clock.run("orbit", [&] {
        const SystemSpec system = make_system(config.system, config.params);
        return sample_orbit(system, config.seed, config.burn_in, config.orbit_length);
    });
    const Context ctx = build_context(config, orbit, report.timing, /*nesting=*/false);
    fill_context_report(report, ctx);

    const long window_hi =
        static_cast<long>(std::floor(static_cast<double>(ctx.n_final) * (1.0 + config.return_ratio)));
    clock.run("separated-set", [&] {
        const std::vector<long> cands = candidate_pool(ctx, window_hi, config.max_candidates);
        report.candidate_count = static_cast<long>(cands.size());
        report.separated =
            greedy_separated_set(ctx.system, ctx.orbit, cands, ctx.n_final, config.epsilon);
        const auto [lower, upper] = separated_count_bounds(report.separated.size(), ctx.n_final,
                                                           config.e_target, config.r, config.delta);
        report.card_lower_ok = lower;
        report.card_upper_ok = upper;
    });

    const ReturnBuckets buckets = clock.run("buckets", [&] {
        ReturnBuckets rb = bucket_by_return(report.separated, ctx.orbit, ctx.partition,
                                            ctx.gamma_prime, ctx.n_final, config.return_ratio);
        report.bucket_total = rb.total();
        report.bucket_dropped = rb.dropped;
        report.window_lo = rb.window_lo;
        report.window_hi = rb.window_hi;
        for (const auto& [k, v] : rb.buckets)
            report.bucket_counts[k] = static_cast<long>(v.size());
        std::vector<long> bucketed;
        for (const auto& [k, v] : rb.buckets) bucketed.insert(bucketed.end(), v.begin(), v.end());
        std::sort(bucketed.begin(), bucketed.end());
        for (long idx : report.separated.indices)
            if (!std::binary_search(bucketed.begin(), bucketed.end(), idx))
                report.dropped_indices.push_back(idx);
        std::sort(report.dropped_indices.begin(), report.dropped_indices.end());
        return rb;
    });

    clock.run("assembly", [&] {
        report.m = select_return_time(buckets);
        const std::vector<long>& f_m = buckets.buckets.at(report.m);
        report.f_m_size = static_cast<long>(f_m.size());
        const auto [base, symbols] = select_base_rectangle(f_m, ctx.orbit, ctx.partition, ctx.cover);
        const double width = static_cast<double>(report.window_hi - report.window_lo);
        report.pigeonhole_ok =
            static_cast<double>(symbols.size()) >=
            static_cast<double>(report.bucket_total) / (width * static_cast<double>(ctx.cover.size()));
        report.horseshoe = assemble_horseshoe(ctx.system, ctx.orbit, ctx.field, ctx.cover, base,
                                              symbols, report.m, config.r, config.trace_grid);
        report.horseshoe.n = ctx.n_final;
        report.horseshoe.epsilon = config.epsilon;
        assert_separation_certificate(ctx, report.horseshoe, ctx.n_final, config.epsilon);
    });

    clock.run("verification", [&] {
        Theorem1Config vcfg;
        vcfg.e_target = config.e_target;
        vcfg.r = config.r;
        vcfg.delta = config.delta;
        vcfg.chi_plus_sum = ctx.spectrum.chi_plus_sum;
        vcfg.weak_star_terms = ctx.K;
        vcfg.proximity_samples = config.proximity_samples;
        verify_theorem1(ctx.system, report.horseshoe, ctx.orbit, ctx.field, ctx.basis, vcfg);
    });

    clock.run("pressure", [&] {
        const EmpiricalMeasure mu = EmpiricalMeasure::from_orbit(ctx.orbit);
        for (long i = 0; i < ctx.K; ++i) {
            const Observable& psi = ctx.basis.members[static_cast<std::size_t>(i)];
            report.pressure_table.emplace_back(
                psi.name, verify_item_v(ctx.system, report.horseshoe, psi, mu, config.e_target,
                                        config.r));
        }
    });

    return report;
}

RunReport run_nest(const PipelineConfig& config) {
    config.validate();
    RunReport report;
    report.config = config;
    report.n_initial = config.n;
    StageClock clock(report.timing);

    const OrbitSegment orbit = clock.run("orbit", [&] {
        const SystemSpec system = make_system(config.system, config.params);
        return sample_orbit(system, config.seed, config.burn_in, config.orbit_length);
    });
    const Context ctx = build_context(config, orbit, report.timing, /*nesting=*/true);
    fill_context_report(report, ctx);
    report.nested = nest_core(ctx, config.e_target, config.depth, config, report.timing);
    return report;
}

NestedSequence nest_entropy_sequence(const SystemSpec& system, const OrbitSegment& orbit, double e,
                                     long depth, const PipelineConfig& config) {
    config.validate();
    require(depth >= 1, "depth must be >= 1");
    require(e >= 0.0, "e must be nonnegative");
    if (system.name != config.system)
        throw ConfigError("system spec does not match the config's system name");
    PipelineConfig local = config;
    local.e_target = e;
    local.depth = depth;
    std::vector<StageTiming> timing;
    const Context ctx = build_context(local, orbit, timing, /*nesting=*/true);
    return nest_core(ctx, e, depth, local, timing);
}

}  // namespace katok
