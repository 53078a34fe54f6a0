#include "katok/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "katok/entropy.hpp"
#include "katok/errors.hpp"
#include "katok/horseshoe.hpp"

namespace katok {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string freq_name(const char* kind, long a, long b) {
    std::string arg;
    if (a != 0) {
        if (a != 1) arg += std::to_string(a);
        arg += "x";
    }
    if (b != 0) {
        if (!arg.empty()) arg += (b > 0 ? "+" : "-");
        else if (b < 0) arg += "-";
        const long ab = std::abs(b);
        if (ab != 1) arg += std::to_string(ab);
        arg += "y";
    }
    return std::string(kind) + "2pi(" + arg + ")";
}

// S_m phi along the forward orbit of x.
double birkhoff_from_point(const SystemSpec& system, const Observable& phi, Point x, long m) {
    double sum = 0.0;
    for (long k = 0; k < m; ++k) {
        sum += phi.eval(x);
        x = system.domain.canonicalize(system.forward(x));
    }
    return sum;
}

double log_sum_exp(const std::vector<double>& vals) {
    const double top = *std::max_element(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += std::exp(v - top);
    return top + std::log(sum);
}

}  // namespace

void EmpiricalMeasure::validate() const {
    if (points.empty() || points.size() != weights.size())
        throw OutOfRangeError("empirical measure needs matching points and weights");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw OutOfRangeError("empirical measure weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw OutOfRangeError("empirical measure weights must sum to 1");
}

double EmpiricalMeasure::integrate(const Observable& phi) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) sum += weights[i] * phi.eval(points[i]);
    return sum;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Point> pts) {
    if (pts.empty()) throw OutOfRangeError("empirical measure needs at least one point");
    EmpiricalMeasure mu;
    mu.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    mu.points = std::move(pts);
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::from_orbit(const OrbitSegment& orbit) {
    return uniform(orbit.points);
}

TestBasis trig_basis(long count) {
    if (count < 1) throw OutOfRangeError("basis needs at least one member");
    TestBasis basis;
    basis.members.push_back({"1", [](const Point&) { return 1.0; }, 1.0});
    auto add = [&](long a, long b) {
        if (basis.size() < count)
            basis.members.push_back({freq_name("cos", a, b),
                                     [a, b](const Point& p) {
                                         return std::cos(kTwoPi * (a * p.x + b * p.y));
                                     },
                                     1.0});
        if (basis.size() < count)
            basis.members.push_back({freq_name("sin", a, b),
                                     [a, b](const Point& p) {
                                         return std::sin(kTwoPi * (a * p.x + b * p.y));
                                     },
                                     1.0});
    };
    for (long d = 1; basis.size() < count; ++d) {
        for (long a = 1; a <= d && basis.size() < count; ++a) {
            const long b = d - a;
            add(a, b);
            if (b != 0) add(a, -b);
        }
        add(0, d);
    }
    return basis;
}

TestBasis chebyshev_basis(const Domain& domain, long count) {
    if (count < 1) throw OutOfRangeError("basis needs at least one member");
    const double wx = domain.width(0), wy = domain.width(1);
    const Vec2 lo = domain.lo;
    auto cheb = [](long k, double u) { return std::cos(k * std::acos(std::clamp(u, -1.0, 1.0))); };
    auto member = [&](long i, long j) {
        return [=](const Point& p) {
            const double u = 2.0 * (p.x - lo.x) / wx - 1.0;
            const double v = 2.0 * (p.y - lo.y) / wy - 1.0;
            return cheb(i, u) * cheb(j, v);
        };
    };
    TestBasis basis;
    for (long d = 0; basis.size() < count; ++d)
        for (long i = d; i >= 0 && basis.size() < count; --i) {
            const long j = d - i;
            auto f = member(i, j);
            double sup = 0.0;  // grid sweep with safety inflation
            for (int gx = 0; gx < 256; ++gx)
                for (int gy = 0; gy < 256; ++gy) {
                    const Point p{lo.x + wx * (gx + 0.5) / 256.0, lo.y + wy * (gy + 0.5) / 256.0};
                    sup = std::max(sup, std::abs(f(p)));
                }
            basis.members.push_back({"T" + std::to_string(i) + "T" + std::to_string(j), f,
                                     std::max(sup * 1.001, 1e-12)});
        }
    return basis;
}

double weak_star_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          const TestBasis& basis, long terms) {
    if (terms < 1) throw OutOfRangeError("weak* distance needs terms >= 1");
    if (terms > basis.size()) throw OutOfRangeError("weak* distance needs terms <= basis size");
    double total = 0.0;
    for (long i = 1; i <= terms; ++i) {
        const Observable& psi = basis.members[static_cast<std::size_t>(i - 1)];
        const double diff = std::abs(mu.integrate(psi) - nu.integrate(psi));
        total += std::exp2(static_cast<double>(-i)) * diff / (2.0 * psi.sup_norm);
    }
    return total;
}

double weak_star_tail(long terms) { return std::exp2(static_cast<double>(-terms)); }

KAndR0 choose_K_r0(double r, const TestBasis& basis, const std::vector<Observable>& density_family) {
    if (!(r > 0.0 && r < 1.0)) throw OutOfRangeError("r must lie in (0,1)");
    long K = 1;
    while (std::exp2(static_cast<double>(-K + 1)) >= r / 2.0) ++K;

    // Optional r-density check of {psi_1..psi_K} against a supplied family:
    // every family member must be within r (sampled sup distance) of some
    // basis member with index <= K.
    if (!density_family.empty()) {
        auto sup_distance = [](const Observable& f, const Observable& g) {
            double sup = 0.0;
            for (int gx = 0; gx < 32; ++gx)
                for (int gy = 0; gy < 32; ++gy) {
                    const Point p{(gx + 0.5) / 32.0, (gy + 0.5) / 32.0};
                    sup = std::max(sup, std::abs(f.eval(p) - g.eval(p)));
                }
            return sup;
        };
        for (const Observable& phi : density_family) {
            bool covered = false;
            while (!covered) {
                for (long i = 0; i < std::min(K, basis.size()); ++i)
                    if (sup_distance(phi, basis.members[static_cast<std::size_t>(i)]) <= r) {
                        covered = true;
                        break;
                    }
                if (covered) break;
                if (K >= basis.size())
                    throw OutOfRangeError("basis too short for the requested density check");
                ++K;
            }
        }
    }
    if (K > basis.size()) throw OutOfRangeError("basis too short for the requested r");

    double max_inv = 0.0;
    for (long i = 0; i < K; ++i)
        max_inv = std::max(max_inv, 1.0 / basis.members[static_cast<std::size_t>(i)].sup_norm);
    // Largest r0 in (0, r) with r0 (1 - 2^{-K}) (1/2) max_inv < r/2: the
    // supremum is open, so back off by one part in 1e9.
    const double bound = (r / 2.0) / ((1.0 - std::exp2(static_cast<double>(-K))) * 0.5 * max_inv);
    const double r0 = std::min(r, bound) * (1.0 - 1e-9);
    return {K, r0};
}

double modulus_of_continuity(const Domain& domain, const Observable& phi, double eps0,
                             const std::vector<std::pair<Point, Point>>& pairs) {
    if (!(eps0 > 0.0)) throw OutOfRangeError("eps0 must be positive");
    double sup = 0.0;
    for (const auto& [x, y] : pairs) {
        if (domain.distance(x, y) > eps0) continue;
        sup = std::max(sup, std::abs(phi.eval(x) - phi.eval(y)));
    }
    return sup;
}

PressureEstimate pressure_variational(const SystemSpec& system, const HorseshoeDescription& desc,
                                      const Observable& phi) {
    if (desc.symbol_count() < 2 || desc.m < 1)
        throw OutOfRangeError("shift model needs N >= 2 symbols and step m >= 1");
    std::vector<double> cylinder;
    cylinder.reserve(desc.symbol_points.size());
    for (const Point& x : desc.symbol_points)
        cylinder.push_back(birkhoff_from_point(system, phi, x, desc.m));
    PressureEstimate est;
    est.value = log_sum_exp(cylinder) / static_cast<double>(desc.m);
    est.method = "variational";
    est.window = desc.m;
    est.support = desc.symbol_count();
    return est;
}

PressureEstimate pressure_partition_function(const SystemSpec& system,
                                             const std::vector<Point>& pool, const Observable& phi,
                                             long n, double epsilon) {
    if (pool.empty()) throw OutOfRangeError("candidate pool is empty");
    const SeparatedSet set = greedy_separated_set(system, pool, n, epsilon);
    std::vector<double> sums;
    sums.reserve(set.points.size());
    for (const Point& x : set.points) sums.push_back(birkhoff_from_point(system, phi, x, n));
    PressureEstimate est;
    est.value = log_sum_exp(sums) / static_cast<double>(n);
    est.method = "partition-function";
    est.window = n;
    est.epsilon = epsilon;
    est.support = set.size();
    return est;
}

ItemVResult verify_item_v(const SystemSpec& system, const HorseshoeDescription& desc,
                          const Observable& phi, const EmpiricalMeasure& mu, double e, double r) {
    ItemVResult res;
    res.pressure = pressure_variational(system, desc, phi).value;
    res.integral = mu.integrate(phi);
    const double lower = e + res.integral - r * (7.0 + e);
    const double upper = e + res.integral + 4.0 * r;
    res.margin_low = res.pressure - lower;
    res.margin_high = upper - res.pressure;
    res.proof_window = res.margin_low >= 0.0 && res.margin_high > 0.0;
    res.strong = std::abs(res.pressure - (e + res.integral)) < r;
    return res;
}

}  // namespace katok
