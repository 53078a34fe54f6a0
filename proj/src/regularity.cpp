#include "katok/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "katok/errors.hpp"

namespace katok {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

TemperedFunctionEstimate estimate_c1_c2(const SplittingField& field, double chi, double gamma,
                                        long horizon, const std::vector<long>& indices) {
    if (!(gamma > 0.0) || !(gamma < chi / 3.0)) throw OutOfRangeError("need 0 < gamma < chi/3");
    TemperedFunctionEstimate est;
    est.gamma = gamma;
    est.indices.reserve(indices.size());
    est.c1.reserve(indices.size());
    est.c2.reserve(indices.size());
    const auto& lcp = field.log_contraction_prefix;
    const auto& lep = field.log_expansion_prefix;
    for (long i : indices) {
        if (i - horizon < 0 || i + horizon >= field.length())
            throw OutOfRangeError("horizon exceeds orbit around index");
        double log_c1 = 0.0;
        for (long n = 1; n <= horizon; ++n) {
            // ||df^n(e^s)|| <= C_1 e^{-n(chi-gamma)} and ||df^{-n}(e^u)|| likewise.
            const double stable_norm = lcp[static_cast<std::size_t>(i + n)] - lcp[static_cast<std::size_t>(i)];
            const double unstable_back =
                -(lep[static_cast<std::size_t>(i)] - lep[static_cast<std::size_t>(i - n)]);
            const double bound = -static_cast<double>(n) * (chi - gamma);
            log_c1 = std::max({log_c1, stable_norm - bound, unstable_back - bound});
        }
        const double c1 = std::exp(log_c1);
        if (c1 > 1e6) throw NotHyperbolicError("required C_1 exceeds 1e6: window shows no contraction");
        est.indices.push_back(i);
        est.c1.push_back(c1);
        est.c2.push_back(field.angle[static_cast<std::size_t>(i)]);
    }
    return est;
}

TemperednessResult temperedness_check(const std::vector<double>& values, double gamma) {
    TemperednessResult res;
    const long n = static_cast<long>(values.size());
    if (n == 0) return {true, 0.0};
    double worst = 0.0;
    // All pairs for short sequences, doubling offsets for long ones.
    std::vector<long> offsets;
    if (n <= 2000) {
        for (long k = 1; k < n; ++k) offsets.push_back(k);
    } else {
        for (long k = 1; k < n; k = std::max(k + 1, (k * 5) / 4)) offsets.push_back(k);
    }
    for (long k : offsets) {
        for (long i = 0; i + k < n; ++i) {
            const double cap = values[static_cast<std::size_t>(i)] * std::exp(gamma * static_cast<double>(k));
            const double fwd = values[static_cast<std::size_t>(i + k)] / cap;
            worst = std::max(worst, fwd);
            const double cap_b =
                values[static_cast<std::size_t>(i + k)] * std::exp(gamma * static_cast<double>(k));
            worst = std::max(worst, values[static_cast<std::size_t>(i)] / cap_b);
        }
    }
    res.worst_ratio = worst;
    res.tempered = worst <= 1.0 + 1e-12;
    return res;
}

PesinBlock pesin_block(const TemperedFunctionEstimate& estimate, int level) {
    if (estimate.indices.empty()) throw OutOfRangeError("empty tempered-function estimate");
    PesinBlock block;
    block.level = level;
    const double inv_level = 1.0 / static_cast<double>(level);
    for (std::size_t k = 0; k < estimate.indices.size(); ++k)
        if (estimate.c1[k] <= static_cast<double>(level) && estimate.c2[k] >= inv_level)
            block.members.push_back(estimate.indices[k]);
    block.fraction = static_cast<double>(block.members.size()) / static_cast<double>(estimate.indices.size());
    return block;
}

namespace {

// Geometric-type series sum_{n=0..T} exp(2 (log_norms[n] - n (rate + gamma))),
// where log_norms[n] = log of the restricted cocycle norm after n steps.
double lyapunov_series(const std::vector<double>& log_norms, double rate, double gamma) {
    double sum = 0.0;
    double prev_term = 0.0, last_term = 0.0;
    for (std::size_t n = 0; n < log_norms.size(); ++n) {
        const double term =
            std::exp(2.0 * (log_norms[n] - static_cast<double>(n) * (rate + gamma)));
        sum += term;
        prev_term = last_term;
        last_term = term;
    }
    if (log_norms.size() >= 3 && last_term > prev_term && last_term > 1e-14)
        throw SeriesDivergenceError("partial sums still growing at the truncation step");
    return sum;
}

// log ||df^n restricted to E^s|| at orbit[index] for n = 0..T. The stable
// directions along the forward orbit are obtained by backward transport (the
// numerically stable direction for the inverse cocycle), then composed from
// one-step norms; forward-pushing a single vector would be swamped by unstable
// contamination after ~15 iterates.
std::vector<double> stable_log_norms(const SystemSpec& system, const OrbitSegment& orbit,
                                     long index, long truncation, const Vec2& seed) {
    const long buffer = std::min<long>(50, orbit.length() - 1 - (index + truncation));
    const long top = index + truncation + buffer;
    Vec2 v = seed;
    std::vector<Vec2> dir(static_cast<std::size_t>(truncation));
    for (long k = top - 1; k >= index; --k) {
        v = (system.derivative(orbit.points[static_cast<std::size_t>(k)]).inverse() * v).normalized();
        if (k < index + truncation) dir[static_cast<std::size_t>(k - index)] = v;
    }
    std::vector<double> out(static_cast<std::size_t>(truncation) + 1, 0.0);
    for (long n = 0; n < truncation; ++n) {
        const double a =
            (system.derivative(orbit.points[static_cast<std::size_t>(index + n)]) *
             dir[static_cast<std::size_t>(n)])
                .norm();
        if (!(a > 0.0)) throw DegenerateCocycleError("one-step stable norm vanished");
        out[static_cast<std::size_t>(n) + 1] = out[static_cast<std::size_t>(n)] + std::log(a);
    }
    return out;
}

// log ||df^{-n} restricted to E^u|| at orbit[index] for n = 0..T, using
// forward transport (stable for unstable directions) from the past.
std::vector<double> unstable_log_norms(const SystemSpec& system, const OrbitSegment& orbit,
                                       long index, long truncation, const Vec2& seed) {
    const long buffer = std::min<long>(50, index - truncation);
    const long bottom = index - truncation - buffer;
    Vec2 v = seed;
    std::vector<Vec2> dir(static_cast<std::size_t>(truncation));
    std::vector<double> rate(static_cast<std::size_t>(truncation), 0.0);
    for (long k = bottom; k < index; ++k) {
        if (k >= index - truncation) dir[static_cast<std::size_t>(k - (index - truncation))] = v;
        const Vec2 w = system.derivative(orbit.points[static_cast<std::size_t>(k)]) * v;
        const double b = w.norm();
        if (!(b > 0.0)) throw DegenerateCocycleError("one-step unstable norm vanished");
        if (k >= index - truncation)
            rate[static_cast<std::size_t>(k - (index - truncation))] = std::log(b);
        v = w / b;
    }
    std::vector<double> out(static_cast<std::size_t>(truncation) + 1, 0.0);
    for (long n = 1; n <= truncation; ++n)
        out[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n) - 1] -
                                           rate[static_cast<std::size_t>(truncation - n)];
    return out;
}

}  // namespace

Mat2 lyapunov_inner_product(const SystemSpec& system, const OrbitSegment& orbit, long index,
                            const SplittingEstimate& splitting, const LyapunovSpectrum& spectrum,
                            double gamma, long truncation) {
    if (truncation < 1) throw OutOfRangeError("truncation must be >= 1");
    if (index - truncation < 0 || index + truncation >= orbit.length())
        throw OutOfRangeError("truncation exceeds orbit around index");

    // chi_{i(x)}: largest negative exponent; chi_{i(x)+1}: smallest positive one.
    double chi_s = 0.0, chi_u = 0.0;
    bool have_s = false, have_u = false;
    for (double e : spectrum.exponents) {
        if (e < 0.0) {
            chi_s = have_s ? std::max(chi_s, e) : e;
            have_s = true;
        } else if (e > 0.0) {
            chi_u = have_u ? std::min(chi_u, e) : e;
            have_u = true;
        }
    }
    if (!have_s || !have_u) throw NotHyperbolicError("spectrum has no sign gap");

    const double g_ss =
        lyapunov_series(stable_log_norms(system, orbit, index, truncation, splitting.stable),
                        chi_s, gamma);
    const double g_uu =
        lyapunov_series(unstable_log_norms(system, orbit, index, truncation, splitting.unstable),
                        -chi_u, gamma);
    // E^s and E^u are declared mutually orthogonal in this inner product.
    return Mat2::diagonal(g_ss, g_uu);
}

LyapunovChart lyapunov_chart(const SystemSpec& system, const OrbitSegment& orbit, long index,
                             const SplittingEstimate& splitting,
                             const SplittingEstimate& splitting_next,
                             const LyapunovSpectrum& spectrum, double gamma, double rho0,
                             long truncation) {
    const Mat2 gram = lyapunov_inner_product(system, orbit, index, splitting, spectrum, gamma, truncation);
    const Mat2 gram_next =
        lyapunov_inner_product(system, orbit, index + 1, splitting_next, spectrum, gamma, truncation);

    auto make_frame = [](const SplittingEstimate& sp, const Mat2& g) {
        return Mat2::from_columns(sp.stable / std::sqrt(g.a), sp.unstable / std::sqrt(g.d));
    };
    LyapunovChart chart;
    chart.orbit_index = index;
    chart.center = orbit.points[static_cast<std::size_t>(index)];
    chart.frame = make_frame(splitting, gram);
    chart.frame_inv = chart.frame.inverse();
    chart.q = rho0 * std::min(1.0, 1.0 / chart.frame_inv.op_norm());
    if (chart.q < 1e-8) throw ChartTooSmallError("q(x) < 1e-8");

    const Mat2 frame_next = make_frame(splitting_next, gram_next);
    const Mat2 frame_next_inv = frame_next.inverse();
    chart.linear_part =
        frame_next_inv * system.derivative(chart.center) * chart.frame;

    const Point center = chart.center;
    const Point center_next = orbit.points[static_cast<std::size_t>(index + 1)];
    const Mat2 frame = chart.frame;
    const Domain dom = system.domain;
    const auto fwd = system.forward;
    chart.lifted = [center, center_next, frame, frame_next_inv, dom, fwd](const Vec2& w) {
        const Point p = dom.canonicalize(center + frame * w);
        const Point fp = dom.canonicalize(fwd(p));
        return frame_next_inv * dom.displacement(center_next, fp);
    };
    return chart;
}

double Rectangle::scale() const { return q / kSqrt2; }

Vec2 Rectangle::to_chart(const Domain& dom, const Point& p) const {
    return (frame_inv * dom.displacement(center, p)) / scale();
}

Point Rectangle::from_chart(const Domain& dom, const Vec2& w) const {
    return dom.canonicalize(center + frame * (w * scale()));
}

bool Rectangle::contains(const Domain& dom, const Point& p) const {
    return to_chart(dom, p).norm_inf() <= h + 1e-12;
}

double Rectangle::diameter() const {
    const Vec2 d1 = frame * Vec2{h * scale(), h * scale()};
    const Vec2 d2 = frame * Vec2{h * scale(), -h * scale()};
    return 2.0 * std::max(d1.norm(), d2.norm());
}

double Rectangle::inradius() const { return h * scale() / frame_inv.max_row_norm(); }

Rectangle rectangle(const LyapunovChart& chart, double h) {
    if (!(h > 0.0) || h > 1.0) throw OutOfRangeError("h must lie in (0, 1]");
    Rectangle rect;
    rect.center = chart.center;
    rect.frame = chart.frame;
    rect.frame_inv = chart.frame_inv;
    rect.q = chart.q;
    rect.h = h;
    rect.orbit_index = chart.orbit_index;
    return rect;
}

bool admissibility_check(const std::vector<Vec2>& graph_samples, ManifoldKind kind, double L) {
    if (!(L > 0.0) || !(L < 0.5)) throw OutOfRangeError("L must lie in (0, 1/2)");
    auto base = [&](const Vec2& w) { return kind == ManifoldKind::Stable ? w.x : w.y; };
    auto height = [&](const Vec2& w) { return kind == ManifoldKind::Stable ? w.y : w.x; };
    for (std::size_t a = 0; a < graph_samples.size(); ++a) {
        for (std::size_t b = a + 1; b < graph_samples.size(); ++b) {
            const double db = std::abs(base(graph_samples[a]) - base(graph_samples[b]));
            const double dh = std::abs(height(graph_samples[a]) - height(graph_samples[b]));
            if (db < 1e-12) {
                if (dh > 1e-9) return false;  // two samples share a base coordinate
                continue;
            }
            if (dh > L * db + 1e-12) return false;
        }
    }
    return true;
}

long RectangleCover::locate(const Domain& dom, const Point& p) const {
    for (long i = 0; i < size(); ++i)
        if (dom.distance(rectangles[static_cast<std::size_t>(i)].center, p) <= rho) return i;
    return -1;
}

RectangleCover rectangle_cover(const SystemSpec& system, const OrbitSegment& orbit,
                               const SplittingField& field, const LyapunovSpectrum& spectrum,
                               const PesinBlock& block, double gamma, double rho0, long truncation,
                               double epsilon1, double rho_requested, double lipschitz_L) {
    if (block.members.empty()) throw CoverFailureError("empty Pesin block");
    if (!(epsilon1 > 0.0)) throw OutOfRangeError("epsilon1 must be positive");

    const Domain& dom = system.domain;
    double rho = rho_requested;
    auto build_rect = [&](long idx) {
        const LyapunovChart chart =
            lyapunov_chart(system, orbit, idx, splitting_at(field, idx), splitting_at(field, idx + 1),
                           spectrum, gamma, rho0, truncation);
        Rectangle full = rectangle(chart, 1.0);
        const double d = full.diameter();
        const double h = d < epsilon1 ? 1.0 : 0.99 * epsilon1 / d;
        return rectangle(chart, h);
    };

    for (int pass = 0; pass < 10; ++pass) {
        RectangleCover cover;
        cover.rho = rho;
        cover.lambda = std::exp(-min_exponent_chi(spectrum) + gamma);
        cover.lipschitz = lipschitz_L;
        cover.epsilon1 = epsilon1;
        double min_inradius = 1e9;
        std::vector<char> covered(block.members.size(), 0);
        for (std::size_t k = 0; k < block.members.size(); ++k) {
            if (covered[k]) continue;
            const long idx = block.members[k];
            const Point& p = orbit.points[static_cast<std::size_t>(idx)];
            Rectangle rect = build_rect(idx);
            min_inradius = std::min(min_inradius, rect.inradius());
            cover.rectangles.push_back(std::move(rect));
            cover.center_indices.push_back(idx);
            if (cover.size() > 10000) throw CoverFailureError("more than 10^4 centers needed");
            for (std::size_t j = k; j < block.members.size(); ++j) {
                if (!covered[j] &&
                    dom.distance(p, orbit.points[static_cast<std::size_t>(block.members[j])]) <= rho)
                    covered[j] = 1;
            }
        }
        if (min_inradius > rho) return cover;
        rho = 0.999 * min_inradius;  // shrink so B(x_i, rho) sits inside every rectangle
        if (rho <= 0.0) throw CoverFailureError("rectangle inradius collapsed");
    }
    throw CoverFailureError("covering radius did not stabilize");
}

namespace {

// Two-pass farthest-point approximation of the diameter of a point cloud.
double approx_diameter(const Domain& dom, const std::vector<Point>& pts) {
    if (pts.size() < 2) return 0.0;
    auto farthest = [&](const Point& from) {
        double best = 0.0;
        Point arg = pts.front();
        for (const Point& p : pts) {
            const double d = dom.distance(from, p);
            if (d > best) {
                best = d;
                arg = p;
            }
        }
        return std::pair<Point, double>{arg, best};
    };
    auto [p1, d1] = farthest(pts.front());
    auto [p2, d2] = farthest(p1);
    (void)p2;
    return std::max(d1, d2);
}

struct TracedComponent {
    int g = 0;
    std::vector<char> comp;                  // g*g mask, index a*g+b with a = s, b = u
    std::vector<std::vector<Point>> traces;  // full trace per hit cell when requested
    long count = 0;

    double coord(const Rectangle& rect, int a) const {
        return rect.h * (2.0 * a / (g - 1.0) - 1.0);
    }
};

// Traces the g x g chart grid of `from` through m applications of `advance`,
// keeps the cells whose endpoint lands in `to`, and flood-fills the
// 4-connected component through the cell nearest to chart point w0.
TracedComponent trace_component(const Domain& dom, const Rectangle& from, const Rectangle& to,
                                const std::function<Point(const Point&)>& advance, long m,
                                const Vec2& w0, int g, bool keep_traces) {
    TracedComponent out;
    out.g = g;
    std::vector<char> hit(static_cast<std::size_t>(g) * g, 0);
    out.traces.resize(keep_traces ? hit.size() : 0);
    for (int a = 0; a < g; ++a) {
        for (int b = 0; b < g; ++b) {
            const Vec2 w{out.coord(from, a), out.coord(from, b)};
            Point p = from.from_chart(dom, w);
            std::vector<Point> trace;
            if (keep_traces) {
                trace.reserve(static_cast<std::size_t>(m) + 1);
                trace.push_back(p);
            }
            for (long k = 0; k < m; ++k) {
                p = advance(p);
                if (keep_traces) trace.push_back(p);
            }
            if (to.contains(dom, p)) {
                const std::size_t id = static_cast<std::size_t>(a) * g + b;
                hit[id] = 1;
                if (keep_traces) out.traces[id] = std::move(trace);
            }
        }
    }
    auto cell_of = [&](double v) {
        return std::clamp(static_cast<int>(std::lround((v / from.h + 1.0) * (g - 1.0) / 2.0)), 0,
                          g - 1);
    };
    int ax = cell_of(w0.x), bx = cell_of(w0.y);
    if (!hit[static_cast<std::size_t>(ax) * g + bx]) {
        // The component can be thinner than a cell; start from the nearest hit.
        int best = -1, best_d = 1 << 30;
        for (int a = std::max(0, ax - 2); a <= std::min(g - 1, ax + 2); ++a)
            for (int b = std::max(0, bx - 2); b <= std::min(g - 1, bx + 2); ++b) {
                const int d = (a - ax) * (a - ax) + (b - bx) * (b - bx);
                if (hit[static_cast<std::size_t>(a) * g + b] && d < best_d) {
                    best = a * g + b;
                    best_d = d;
                }
            }
        if (best >= 0) {
            ax = best / g;
            bx = best % g;
        }
    }
    out.comp.assign(hit.size(), 0);
    if (hit[static_cast<std::size_t>(ax) * g + bx]) {
        std::deque<std::pair<int, int>> queue{{ax, bx}};
        out.comp[static_cast<std::size_t>(ax) * g + bx] = 1;
        while (!queue.empty()) {
            auto [a, b] = queue.front();
            queue.pop_front();
            const int da[4] = {1, -1, 0, 0}, db[4] = {0, 0, 1, -1};
            for (int t = 0; t < 4; ++t) {
                const int na = a + da[t], nb = b + db[t];
                if (na < 0 || nb < 0 || na >= g || nb >= g) continue;
                const std::size_t id = static_cast<std::size_t>(na) * g + nb;
                if (hit[id] && !out.comp[id]) {
                    out.comp[id] = 1;
                    queue.emplace_back(na, nb);
                }
            }
        }
    }
    out.count = std::count(out.comp.begin(), out.comp.end(), char(1));
    return out;
}

// Midpoint graph of a traced component over one chart axis: over s-columns for
// the stable kind (base = s, height = u midrange), over u-columns otherwise.
// Returns an empty vector when some column of the grid has no component cell.
std::vector<Vec2> component_graph(const TracedComponent& tc, const Rectangle& rect,
                                  ManifoldKind kind) {
    std::vector<Vec2> graph;
    const int g = tc.g;
    for (int outer = 0; outer < g; ++outer) {
        double lo = 1e9, hi = -1e9;
        for (int inner = 0; inner < g; ++inner) {
            const int a = kind == ManifoldKind::Stable ? outer : inner;
            const int b = kind == ManifoldKind::Stable ? inner : outer;
            if (tc.comp[static_cast<std::size_t>(a) * g + b]) {
                lo = std::min(lo, tc.coord(rect, inner));
                hi = std::max(hi, tc.coord(rect, inner));
            }
        }
        if (lo > hi) return {};
        const double base = tc.coord(rect, outer);
        const double height = 0.5 * (lo + hi);
        graph.push_back(kind == ManifoldKind::Stable ? Vec2{base, height} : Vec2{height, base});
    }
    return graph;
}

}  // namespace

ReturnCheckRecord return_rectangle_check(const SystemSpec& system, const OrbitSegment& orbit,
                                         const SplittingField& field, const RectangleCover& cover,
                                         long index, long m, double r, int grid) {
    const Domain& dom = system.domain;
    const Point x = orbit.points[static_cast<std::size_t>(index)];
    const Point fx = orbit.points[static_cast<std::size_t>(index + m)];
    ReturnCheckRecord rec;
    rec.index = index;
    rec.m = m;
    rec.rect_from = cover.locate(dom, x);
    rec.rect_to = cover.locate(dom, fx);
    if (rec.rect_from < 0 || rec.rect_to < 0)
        throw OutOfRangeError("return endpoints not inside any cover ball");
    const Rectangle& ri = cover.rectangles[static_cast<std::size_t>(rec.rect_from)];
    const Rectangle& rj = cover.rectangles[static_cast<std::size_t>(rec.rect_to)];

    // Trace a chart grid through f^m and keep the connected component of x
    // inside R(x_i) \cap f^{-m} R(x_j).
    const int g = grid;
    const TracedComponent fwd = trace_component(
        dom, ri, rj, [&](const Point& p) { return dom.canonicalize(system.forward(p)); }, m,
        ri.to_chart(dom, x), g, /*keep_traces=*/true);
    rec.component_escaped = fwd.count < 2;
    if (!rec.component_escaped) {
        // Item 3, stable side: the component is the graph of a Lipschitz map
        // over the s-axis of chart i.
        const std::vector<Vec2> stable_graph = component_graph(fwd, ri, ManifoldKind::Stable);
        rec.stable_admissible = !stable_graph.empty() &&
                                admissibility_check(stable_graph, ManifoldKind::Stable, cover.lipschitz);

        // Item 3, unstable side: f^m(component) is a graph over the u-axis of
        // chart j. Trace it backward from chart j; the forward cell images are
        // spread along u' by the full expansion and cannot sample a graph.
        if (system.has_inverse()) {
            const TracedComponent back = trace_component(
                dom, rj, ri, [&](const Point& p) { return dom.canonicalize(system.inverse(p)); }, m,
                rj.to_chart(dom, fx), g, /*keep_traces=*/false);
            const std::vector<Vec2> unstable_graph = component_graph(back, rj, ManifoldKind::Unstable);
            rec.unstable_admissible =
                back.count >= 2 && !unstable_graph.empty() &&
                admissibility_check(unstable_graph, ManifoldKind::Unstable, cover.lipschitz);
        }

        // Item 4: intermediate diameters against 3 diam R(x_i) max{l^k, l^{m-k}}.
        const double diam_r = ri.diameter();
        for (long k = 0; k <= m; ++k) {
            std::vector<Point> pts;
            pts.reserve(static_cast<std::size_t>(fwd.count));
            for (std::size_t id = 0; id < fwd.comp.size(); ++id)
                if (fwd.comp[id]) pts.push_back(fwd.traces[id][static_cast<std::size_t>(k)]);
            const double diam_k = approx_diameter(dom, pts);
            const double bound = 3.0 * diam_r *
                                 std::max(std::pow(cover.lambda, static_cast<double>(k)),
                                          std::pow(cover.lambda, static_cast<double>(m - k)));
            rec.max_diameter_ratio = std::max(rec.max_diameter_ratio, diam_k / bound);
        }
    }

    // Item 5: Jacobian deviation between the return orbit and the center.
    const long ci = cover.center_indices[static_cast<std::size_t>(rec.rect_from)];
    if (ci + m < field.length()) {
        rec.jacobian_deviation = std::abs(field.psi(index, m) - field.psi(ci, m));
        rec.item5_ok = rec.jacobian_deviation < r;
    }
    return rec;
}

DominationResult domination_check(const SystemSpec& system, const std::vector<Point>& samples,
                                  const std::vector<SplittingEstimate>& splittings, long N) {
    if (samples.size() != splittings.size()) throw OutOfRangeError("samples/splittings size mismatch");
    DominationResult res;
    res.worst_ratio = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        Vec2 vs = splittings[k].stable, vu = splittings[k].unstable;
        Point p = samples[k];
        double log_s = 0.0, log_u = 0.0;
        for (long i = 0; i < N; ++i) {
            const Mat2 df = system.derivative(p);
            vs = df * vs;
            vu = df * vu;
            log_s += std::log(vs.norm());
            log_u += std::log(vu.norm());
            vs = vs.normalized();
            vu = vu.normalized();
            p = system.domain.canonicalize(system.forward(p));
        }
        res.worst_ratio = std::max(res.worst_ratio, std::exp(log_s - log_u));
    }
    res.dominated = res.worst_ratio <= 0.5;
    return res;
}

NHyperbolicityResult n_hyperbolicity_averages(const SplittingField& field, long N, double gamma,
                                              double chi) {
    const long lo = field.valid_from, hi = field.valid_to;
    if (hi - lo < 10 * N) throw OutOfRangeError("orbit length must be >= 10 N inside the valid window");
    const long blocks = (hi - lo) / N;
    const long span = blocks * N;
    NHyperbolicityResult res;
    // One-dimensional bundles make the block sums telescope into prefix differences.
    res.forward_average = (field.log_contraction_prefix[static_cast<std::size_t>(lo + span)] -
                           field.log_contraction_prefix[static_cast<std::size_t>(lo)]) /
                          static_cast<double>(span);
    res.backward_average = -(field.log_expansion_prefix[static_cast<std::size_t>(hi)] -
                             field.log_expansion_prefix[static_cast<std::size_t>(hi - span)]) /
                           static_cast<double>(span);
    res.verdict = res.forward_average <= -chi + gamma && res.backward_average <= -chi + gamma;
    return res;
}

}  // namespace katok
