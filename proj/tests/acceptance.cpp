// Acceptance gate: one line per criterion, exit code = number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "katok/errors.hpp"
#include "katok/pipeline.hpp"

using namespace katok;

namespace {

int g_failures = 0;

void criterion(int number, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", number, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<long> probe_indices(long count, long start, long step) {
    std::vector<long> out;
    for (long k = 0; k < count; ++k) out.push_back(start + k * step);
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

constexpr double kCatChi = 0.9624236501192069;  // log((3+sqrt(5))/2)

// ---- criterion 1: cat-map spectrum ------------------------------------------
void run_criterion_1(const SystemSpec& cat) {
    const auto t0 = std::chrono::steady_clock::now();
    const OrbitSegment orb = sample_orbit(cat, 7, 1000, 100000);
    const LyapunovSpectrum spec = lyapunov_spectrum_qr(cat, orb);
    const double elapsed = seconds_since(t0);
    const bool values = spec.exponents.size() == 2 &&
                        std::abs(spec.exponents[0] + kCatChi) < 1e-6 &&
                        std::abs(spec.exponents[1] - kCatChi) < 1e-6;
    criterion(1, values && elapsed < 2.0,
              "exponents (" + fmt(spec.exponents[0]) + ", " + fmt(spec.exponents[1]) +
                  ") vs ±" + fmt(kCatChi) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 2: Oseledets invariance on the perturbed cat map -------------
void run_criterion_2() {
    const SystemSpec pcat = make_system("pcat", {{"kappa", 0.02}});
    const OrbitSegment orb = sample_orbit(pcat, 21, 1000, 4000);
    long aligned = 0;
    const long window = 40;
    for (long j = 0; j < 100; ++j) {
        const long i = 200 + 30 * j;
        // Independent two-sided power method at i and at i+1.
        const SplittingEstimate at = oseledets_splitting(pcat, orb, i, window);
        const SplittingEstimate next = oseledets_splitting(pcat, orb, i + 1, window);
        const Vec2 pushed = derivative(pcat, orb.points[static_cast<std::size_t>(i)]) * at.unstable;
        const double norm = std::sqrt(pushed.x * pushed.x + pushed.y * pushed.y);
        const double cross =
            std::abs(pushed.x * next.unstable.y - pushed.y * next.unstable.x) / norm;
        if (std::asin(std::min(1.0, cross)) < 1e-3) ++aligned;
    }
    criterion(2, aligned >= 95, std::to_string(aligned) + "/100 points aligned within 1e-3 rad");
}

// ---- criterion 3: greedy vs brute-force Bowen-matrix greedy -----------------
void run_criterion_3(const SystemSpec& cat, const RunReport& c5) {
    const OrbitSegment orb = sample_orbit(cat, 33, 1000, 6000);
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<long> pick(0, 5000);
    std::uniform_int_distribution<long> size(2, 12);
    std::uniform_int_distribution<long> npick(3, 8);
    std::uniform_real_distribution<double> epick(0.05, 0.3);

    long exact = 0, maximal = 0;
    const long trials = 50;
    for (long t = 0; t < trials; ++t) {
        std::vector<long> cands;
        for (long c = size(rng); c > 0; --c) cands.push_back(pick(rng));
        const long n = npick(rng);
        const double eps = epick(rng);

        // Reference: pairwise Bowen matrix, then the keep-first deletion loop.
        const auto covered = [&](long a, long b) {
            return bowen_ball_contains(cat, orb.points[static_cast<std::size_t>(a)],
                                       orb.points[static_cast<std::size_t>(b)], n, eps);
        };
        std::vector<long> reference;
        std::vector<bool> deleted(cands.size(), false);
        for (std::size_t a = 0; a < cands.size(); ++a) {
            if (deleted[a]) continue;
            reference.push_back(cands[a]);
            for (std::size_t b = a + 1; b < cands.size(); ++b)
                if (!deleted[b] && covered(cands[a], cands[b])) deleted[b] = true;
        }

        const SeparatedSet got = greedy_separated_set(cat, orb, cands, n, eps);
        if (got.indices == reference) ++exact;

        // Invariants: pairwise separation and maximality over the candidates.
        bool ok = true;
        for (std::size_t a = 0; a < got.indices.size() && ok; ++a)
            for (std::size_t b = a + 1; b < got.indices.size() && ok; ++b)
                ok = !covered(got.indices[a], got.indices[b]);
        for (long c : cands) {
            bool inside = false;
            for (long mref : got.indices) inside = inside || covered(mref, c);
            ok = ok && inside;
        }
        if (ok) ++maximal;
    }

    // Sampled pairwise separation on the full extraction run's set.
    std::uniform_int_distribution<long> epair(0, c5.separated.size() - 1);
    bool run_ok = c5.separated.size() >= 2;
    for (long t = 0; t < 300; ++t) {
        const long a = epair(rng), b = epair(rng);
        if (a == b) continue;
        run_ok = run_ok && !bowen_ball_contains(make_system(c5.config.system),
                                                c5.separated.points[static_cast<std::size_t>(a)],
                                                c5.separated.points[static_cast<std::size_t>(b)],
                                                c5.separated.n, c5.separated.epsilon);
    }
    criterion(3, exact == trials && maximal == trials && run_ok,
              std::to_string(exact) + "/" + std::to_string(trials) + " exact matches, " +
                  std::to_string(maximal) + "/" + std::to_string(trials) +
                  " invariant trials, pipeline set sampled-separated=" +
                  (run_ok ? "yes" : "no"));
}

// ---- criterion 4: recurrence lemma ------------------------------------------
void run_criterion_4(const SystemSpec& cat) {
    const OrbitSegment orb = sample_orbit(cat, 55, 1000, 60000);
    const Partition part = grid_partition(cat.domain, 0.2);
    std::vector<long> target;
    for (long i = 0; i < orb.length(); ++i) target.push_back(i);
    const std::vector<long> grid{500, 1000, 2000, 5000, 10000};

    const SelectionResult res = select_gamma_r(orb, part, target, 0.1, 0.2, grid);
    bool verified = !res.members.empty();
    long checked = 0;
    for (std::size_t j = 0; j < res.members.size() && checked < 30; j += 97, ++checked) {
        const long i = res.members[j];
        const long cell = part.locate(orb.points[static_cast<std::size_t>(i)]);
        for (long n : grid) {
            if (n < res.threshold_n) continue;
            if (i + n + n / 5 >= orb.length()) continue;
            bool returned = false;
            for (long k = n; k <= n + n / 5; ++k)
                returned =
                    returned || part.locate(orb.points[static_cast<std::size_t>(i + k)]) == cell;
            verified = verified && returned;
        }
    }

    const bool c_ok = recurrence_constant({0.5, 0.5}, 0.2) == 0.125 &&
                      recurrence_constant({1.0}, 0.05) == 0.05 &&
                      recurrence_constant({0.8, 0.0, 0.2}, 0.3) == 0.05;
    criterion(4, res.fraction >= 0.9 && verified && c_ok,
              "fraction " + fmt(res.fraction) + " at n_R=" + std::to_string(res.threshold_n) +
                  ", " + std::to_string(checked) + " members re-verified, constants " +
                  (c_ok ? "exact" : "WRONG"));
}

// ---- criterion 5: end-to-end Theorem 1 --------------------------------------
void run_criterion_5(const RunReport& report, double elapsed) {
    const HorseshoeDescription& desc = report.horseshoe;
    const double e = report.config.e_target, r = report.config.r;
    const double lower = e - r * (4.0 + e) -
                         (std::log(static_cast<double>(report.cover_size)) +
                          std::abs(std::log(1.0 - 5.0 * report.config.delta))) /
                             static_cast<double>(report.m);
    const bool window = desc.entropy >= lower && desc.entropy <= e + r;
    const bool vi = desc.ledger.find("vi-jacobian").value < 1e-6;
    const bool iii = desc.ledger.find("iii-weakstar").value < r;
    criterion(5,
              desc.symbol_count() >= 2 && window && vi && iii && elapsed < 120.0,
              "N=" + std::to_string(desc.symbol_count()) + ", h=" + fmt(desc.entropy) +
                  " in [" + fmt(lower) + ", " + fmt(e + r) + "], vi=" +
                  fmt(desc.ledger.find("vi-jacobian").value) + ", iii=" +
                  fmt(desc.ledger.find("iii-weakstar").value) + " at K=" +
                  std::to_string(report.K) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 6: pressure identities ---------------------------------------
void run_criterion_6(const SystemSpec& cat, const RunReport& c5) {
    // phi constant: P = entropy + c to 1e-12 on the extracted shift model.
    const Observable constant{"const", [](const Point&) { return 0.37; }, 0.37};
    const double p_const = pressure_variational(cat, c5.horseshoe, constant).value;
    const bool const_ok = std::abs(p_const - (c5.horseshoe.entropy + 0.37)) < 1e-12;

    // 2-symbol cylinder potential vs the Bernoulli variational oracle.
    HorseshoeDescription two;
    two.m = 1;
    two.symbol_points = {Point{0.13, 0.41}, Point{0.67, 0.29}};
    two.symbol_indices = {0, 1};
    two.entropy = std::log(2.0);
    const Observable phi{"cosx", [](const Point& p) { return std::cos(6.283185307179586 * p.x); },
                         1.0};
    const double p_two = pressure_variational(cat, two, phi).value;
    const double a0 = phi.eval(two.symbol_points[0]);
    const double a1 = phi.eval(two.symbol_points[1]);
    double oracle = -1e300;
    for (long k = 1; k < 200000; ++k) {
        const double p = static_cast<double>(k) / 200000.0;
        oracle = std::max(oracle, -p * std::log(p) - (1.0 - p) * std::log(1.0 - p) + p * a0 +
                                      (1.0 - p) * a1);
    }
    const bool two_ok = std::abs(p_two - oracle) < 1e-6;

    // Item v window for cos 2 pi x on the criterion-5 run.
    bool cos_found = false, cos_ok = false;
    for (const auto& [name, row] : c5.pressure_table)
        if (!cos_found && name.find("cos") != std::string::npos &&
            name.find("x") != std::string::npos) {
            cos_found = true;
            cos_ok = row.proof_window;
        }
    criterion(6, const_ok && two_ok && cos_found && cos_ok,
              "|P-(h+c)|=" + fmt(std::abs(p_const - (c5.horseshoe.entropy + 0.37))) +
                  ", |P2-oracle|=" + fmt(std::abs(p_two - oracle)) + ", cos2pix window " +
                  (cos_ok ? "pass" : "fail"));
}

// ---- criterion 7: weak* metric ----------------------------------------------
void run_criterion_7() {
    const TestBasis basis = trig_basis(8);
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    const auto random_measure = [&] {
        std::vector<Point> pts;
        for (int k = 0; k < 20; ++k) pts.push_back({coord(rng), coord(rng)});
        return EmpiricalMeasure::uniform(std::move(pts));
    };

    bool ok = true;
    double worst_triangle = 0.0;
    for (int t = 0; t < 100; ++t) {
        const EmpiricalMeasure a = random_measure(), b = random_measure(), c = random_measure();
        const double ab = weak_star_distance(a, b, basis, 8);
        const double ba = weak_star_distance(b, a, basis, 8);
        const double ac = weak_star_distance(a, c, basis, 8);
        const double cb = weak_star_distance(c, b, basis, 8);
        ok = ok && ab == ba;                                  // symmetry, exact
        ok = ok && weak_star_distance(a, a, basis, 8) == 0.0;  // identity, exact
        ok = ok && ab <= 1.0 && ac <= 1.0;
        worst_triangle = std::max(worst_triangle, ab - (ac + cb));
    }
    ok = ok && worst_triangle <= 1e-12;

    const KAndR0 kr = choose_K_r0(0.1, basis);
    criterion(7, ok && kr.K == 6,
              "symmetry/identity exact, worst triangle slack " + fmt(worst_triangle) +
                  ", K=" + std::to_string(kr.K));
}

// ---- criterion 8: Theorem 2 nesting -----------------------------------------
void run_criterion_8(const RunReport& nest) {
    bool ok = nest.nested.stages.size() == 3;
    double prev = 1e300;
    std::string hs;
    for (const NestedStage& stage : nest.nested.stages) {
        ok = ok && stage.achieved > 0.3 && stage.achieved < prev && stage.contained;
        prev = stage.achieved;
        hs += (hs.empty() ? "" : " > ") + fmt(stage.achieved);
    }
    const double gap = nest.nested.stages.empty() ? 1e300 : prev - 0.3;
    ok = ok && gap <= 0.15;
    criterion(8, ok, "entropies " + hs + ", final gap " + fmt(gap));
}

// ---- criterion 9: Brin-Katok estimator --------------------------------------
void run_criterion_9(const SystemSpec& cat) {
    const std::vector<long> ns{1, 2, 3, 4, 5};
    const std::vector<double> eps{0.2, 0.1};
    const OrbitSegment corb = sample_orbit(cat, 74, 1000, 200000);
    const auto cest = brin_katok_entropy(cat, corb, probe_indices(40, 100, 997), ns, eps, 3);

    const SystemSpec rot = make_system("rotation");
    const OrbitSegment rorb = sample_orbit(rot, 74, 100, 200000);
    const auto rest = brin_katok_entropy(rot, rorb, probe_indices(40, 100, 997), ns, eps, 3);

    criterion(9, std::abs(cest.headline - kCatChi) < 0.1 && std::abs(rest.headline) < 0.05,
              "cat headline " + fmt(cest.headline) + " vs " + fmt(kCatChi) +
                  ", rotation headline " + fmt(rest.headline));
}

// ---- criterion 10: return-rectangle lemma items -----------------------------
void run_criterion_10(const RunReport& c5, const RunReport& nest) {
    std::vector<const ReturnCheckRecord*> records;
    for (const ReturnCheckRecord& rec : c5.horseshoe.checks) records.push_back(&rec);
    for (const NestedStage& stage : nest.nested.stages)
        for (const ReturnCheckRecord& rec : stage.desc.checks) records.push_back(&rec);

    long detected = 0;
    bool items_ok = true;
    double worst_ratio = 0.0, worst_dev = 0.0;
    for (const ReturnCheckRecord* rec : records) {
        if (rec->component_escaped) continue;
        ++detected;
        worst_ratio = std::max(worst_ratio, rec->max_diameter_ratio);
        worst_dev = std::max(worst_dev, rec->jacobian_deviation);
        items_ok = items_ok && rec->item5_ok && rec->max_diameter_ratio <= 1.0 + 1e-9 &&
                   rec->jacobian_deviation <= 1e-9;
    }

    const double lo = std::exp(-c5.chi - c5.config.gamma);
    const double hi = std::exp(-c5.chi + c5.config.gamma);
    const bool lambda_ok =
        c5.cover_lambda >= lo - 1e-12 && c5.cover_lambda <= hi + 1e-12;
    criterion(10, detected >= 1 && items_ok && lambda_ok,
              std::to_string(detected) + " detected returns, worst diameter ratio " +
                  fmt(worst_ratio) + ", worst item-5 deviation " + fmt(worst_dev) +
                  ", lambda " + fmt(c5.cover_lambda) + " in [" + fmt(lo) + ", " + fmt(hi) + "]");
}

}  // namespace

int main() {
    try {
        const SystemSpec cat = make_system("cat");

        run_criterion_1(cat);
        run_criterion_2();

        PipelineConfig extract_config;
        extract_config.orbit_length = 1000000;
        const auto t5 = std::chrono::steady_clock::now();
        const RunReport c5 = run_extract(extract_config);
        const double c5_elapsed = seconds_since(t5);

        PipelineConfig nest_config;
        nest_config.orbit_length = 1000000;
        nest_config.e_target = 0.3;
        nest_config.depth = 3;
        const RunReport c8 = run_nest(nest_config);

        run_criterion_3(cat, c5);
        run_criterion_4(cat);
        run_criterion_5(c5, c5_elapsed);
        run_criterion_6(cat, c5);
        run_criterion_7();
        run_criterion_8(c8);
        run_criterion_9(cat);
        run_criterion_10(c5, c8);
    } catch (const Error& err) {
        std::printf("acceptance aborted: %s\n", err.what());
        return 99;
    }
    return g_failures;
}
