#include "katok/dynamics.hpp"

#include <cmath>
#include <random>

#include "katok/errors.hpp"

namespace katok {

namespace {

double wrap_unit(double v) {
    double w = v - std::floor(v);
    if (w >= 1.0) w -= 1.0;  // guard against -1e-17 rounding to 1.0
    return w;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Vec2 Domain::canonicalize(const Vec2& p) const {
    if (kind == DomainKind::Torus) {
        return {lo.x + wrap_unit((p.x - lo.x) / width(0)) * width(0),
                lo.y + wrap_unit((p.y - lo.y) / width(1)) * width(1)};
    }
    return p;
}

Vec2 Domain::displacement(const Vec2& a, const Vec2& b) const {
    Vec2 d = b - a;
    if (kind == DomainKind::Torus) {
        d.x -= std::round(d.x / width(0)) * width(0);
        d.y -= std::round(d.y / width(1)) * width(1);
    }
    return d;
}

double Domain::distance(const Vec2& a, const Vec2& b) const { return displacement(a, b).norm(); }

Point step(const SystemSpec& system, const Point& x, long k) {
    if (k < 0 && !system.has_inverse())
        throw InversionUnavailableError("system '" + system.name + "' declares no inverse");
    Point p = system.domain.canonicalize(x);
    for (long i = 0; i < std::abs(k); ++i)
        p = system.domain.canonicalize(k > 0 ? system.forward(p) : system.inverse(p));
    return p;
}

Mat2 derivative(const SystemSpec& system, const Point& x) { return system.derivative(x); }

Mat2 derivative_fd(const SystemSpec& system, const Point& x, double h) {
    const Domain& dom = system.domain;
    auto col = [&](const Vec2& e) {
        const Vec2 fp = system.forward(dom.canonicalize(x + e * h));
        const Vec2 fm = system.forward(dom.canonicalize(x - e * h));
        return dom.displacement(fm, fp) / (2.0 * h);
    };
    const Vec2 cx = col({1.0, 0.0});
    const Vec2 cy = col({0.0, 1.0});
    return Mat2::from_columns(cx, cy);
}

OrbitSegment sample_orbit(const SystemSpec& system, std::uint64_t seed, long burn_in, long length) {
    if (length < 1) throw OutOfRangeError("orbit length must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Iterating the baker map in floating point zero-fills the mantissa of x,
    // so every orbit collapses onto the fixed point within ~53 steps. Build
    // baker orbits from an explicit random bit string instead: x_n reads the
    // future bits and y_n the past bits, a Lebesgue-generic orbit of the
    // natural extension that satisfies the map to machine precision.
    if (system.name == "baker") {
        std::bernoulli_distribution coin(0.5);
        std::vector<char> bits(static_cast<std::size_t>(burn_in + length + 106));
        for (auto& b : bits) b = coin(rng) ? 1 : 0;
        OrbitSegment seg;
        seg.system_name = system.name;
        seg.seed = seed;
        seg.burn_in = burn_in;
        seg.points.reserve(static_cast<std::size_t>(length));
        for (long i = 0; i < length; ++i) {
            const long m = burn_in + 53 + i;
            double x = 0.0, y = 0.0;
            for (long k = 52; k >= 0; --k) x = (x + bits[static_cast<std::size_t>(m + k)]) * 0.5;
            for (long k = 53; k >= 1; --k) y = (y + bits[static_cast<std::size_t>(m - k)]) * 0.5;
            seg.points.push_back({x, y});
        }
        seg.base = seg.points.front();
        return seg;
    }

    // Sampling region: the torus itself, or a system-appropriate sub-box for
    // planar systems where generic initial points escape.
    auto draw_initial = [&]() -> Vec2 {
        if (system.domain.kind == DomainKind::Torus)
            return {unit(rng), unit(rng)};
        if (system.name == "linear") return {0.0, 2.0 * unit(rng) - 1.0};
        return {unit(rng) - 0.5, 0.5 * unit(rng) - 0.25};  // henon family
    };

    const double escape = 1e6;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec2 p = system.domain.canonicalize(draw_initial());
        bool ok = true;
        for (long i = 0; i < burn_in; ++i) {
            p = system.domain.canonicalize(system.forward(p));
            if (!(p.norm() < escape)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        OrbitSegment seg;
        seg.system_name = system.name;
        seg.seed = seed;
        seg.burn_in = burn_in;
        seg.base = p;
        seg.points.reserve(static_cast<std::size_t>(length));
        seg.points.push_back(p);
        for (long i = 1; i < length; ++i) {
            p = system.domain.canonicalize(system.forward(p));
            if (!(p.norm() < escape)) {
                ok = false;
                break;
            }
            seg.points.push_back(p);
        }
        if (ok) return seg;
    }
    throw OutOfRangeError("could not find a non-escaping initial point for '" + system.name + "'");
}

namespace {

SystemSpec make_cat() {
    SystemSpec s;
    s.name = "cat";
    s.domain = {DomainKind::Torus, {0, 0}, {1, 1}};
    s.forward = [d = s.domain](const Vec2& p) { return d.canonicalize({2 * p.x + p.y, p.x + p.y}); };
    s.inverse = [d = s.domain](const Vec2& p) { return d.canonicalize({p.x - p.y, -p.x + 2 * p.y}); };
    s.derivative = [](const Vec2&) { return Mat2{2, 1, 1, 1}; };
    const double chi = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    s.known_spectrum = std::vector<double>{-chi, chi};
    return s;
}

SystemSpec make_pcat(double kappa) {
    SystemSpec s;
    s.name = "pcat";
    s.domain = {DomainKind::Torus, {0, 0}, {1, 1}};
    auto fwd = [d = s.domain, kappa](const Vec2& p) {
        return d.canonicalize({2 * p.x + p.y + kappa * std::sin(kTwoPi * p.y) / kTwoPi,
                               p.x + p.y + kappa * std::sin(kTwoPi * p.x) / kTwoPi});
    };
    auto der = [kappa](const Vec2& p) {
        return Mat2{2.0, 1.0 + kappa * std::cos(kTwoPi * p.y), 1.0 + kappa * std::cos(kTwoPi * p.x), 1.0};
    };
    s.forward = fwd;
    s.derivative = der;
    // Newton inversion on the torus, seeded with the unperturbed cat inverse.
    s.inverse = [d = s.domain, fwd, der](const Vec2& z) {
        Vec2 w = d.canonicalize({z.x - z.y, -z.x + 2 * z.y});
        for (int it = 0; it < 64; ++it) {
            const Vec2 r = d.displacement(fwd(w), z);
            if (r.norm() < 1e-14) break;
            w = d.canonicalize(w + der(w).inverse() * r);
        }
        return w;
    };
    return s;
}

SystemSpec make_henon(double a, double b, const char* name) {
    SystemSpec s;
    s.name = name;
    s.domain = {DomainKind::Box, {-3, -3}, {3, 3}};
    s.forward = [a, b](const Vec2& p) { return Vec2{1.0 + p.y - a * p.x * p.x, b * p.x}; };
    s.inverse = [a, b](const Vec2& p) {
        const double x = p.y / b;
        return Vec2{x, p.x - 1.0 + a * x * x};
    };
    s.derivative = [a, b](const Vec2& p) { return Mat2{-2.0 * a * p.x, 1.0, b, 0.0}; };
    return s;
}

SystemSpec make_linear() {
    SystemSpec s;
    s.name = "linear";
    s.domain = {DomainKind::Box, {-1, -1}, {1, 1}};
    s.forward = [](const Vec2& p) { return Vec2{2.0 * p.x, 0.5 * p.y}; };
    s.inverse = [](const Vec2& p) { return Vec2{0.5 * p.x, 2.0 * p.y}; };
    s.derivative = [](const Vec2&) { return Mat2::diagonal(2.0, 0.5); };
    s.known_spectrum = std::vector<double>{-std::log(2.0), std::log(2.0)};
    return s;
}

// Doubling-type piecewise-affine model with derivative diag(2, 1/2) a.e. and
// the unit square invariant; entropy log 2 with respect to Lebesgue.
SystemSpec make_baker() {
    SystemSpec s;
    s.name = "baker";
    s.domain = {DomainKind::Box, {0, 0}, {1, 1}};
    s.forward = [](const Vec2& p) {
        if (p.x < 0.5) return Vec2{2.0 * p.x, 0.5 * p.y};
        return Vec2{2.0 * p.x - 1.0, 0.5 * p.y + 0.5};
    };
    s.inverse = [](const Vec2& p) {
        if (p.y < 0.5) return Vec2{0.5 * p.x, 2.0 * p.y};
        return Vec2{0.5 * p.x + 0.5, 2.0 * p.y - 1.0};
    };
    s.derivative = [](const Vec2&) { return Mat2::diagonal(2.0, 0.5); };
    s.known_spectrum = std::vector<double>{-std::log(2.0), std::log(2.0)};
    return s;
}

SystemSpec make_rotation(double alpha, double beta) {
    SystemSpec s;
    s.name = "rotation";
    s.domain = {DomainKind::Torus, {0, 0}, {1, 1}};
    s.forward = [d = s.domain, alpha, beta](const Vec2& p) { return d.canonicalize({p.x + alpha, p.y + beta}); };
    s.inverse = [d = s.domain, alpha, beta](const Vec2& p) { return d.canonicalize({p.x - alpha, p.y - beta}); };
    s.derivative = [](const Vec2&) { return Mat2::identity(); };
    s.known_spectrum = std::vector<double>{0.0, 0.0};
    return s;
}

SystemSpec make_identity() {
    SystemSpec s;
    s.name = "identity";
    s.domain = {DomainKind::Torus, {0, 0}, {1, 1}};
    s.forward = [](const Vec2& p) { return p; };
    s.inverse = [](const Vec2& p) { return p; };
    s.derivative = [](const Vec2&) { return Mat2::identity(); };
    s.known_spectrum = std::vector<double>{0.0, 0.0};
    return s;
}

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

}  // namespace

SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "cat") return make_cat();
    if (name == "pcat") return make_pcat(param_or(params, "kappa", 0.02));
    if (name == "henon") return make_henon(param_or(params, "a", 1.4), param_or(params, "b", 0.3), "henon");
    if (name == "henon_horseshoe")
        return make_henon(param_or(params, "a", 6.0), param_or(params, "b", 0.3), "henon_horseshoe");
    if (name == "linear") return make_linear();
    if (name == "baker") return make_baker();
    if (name == "rotation")
        return make_rotation(param_or(params, "alpha", 0.6180339887498949), param_or(params, "beta", 0.5477225575051661));
    if (name == "identity") return make_identity();
    throw ConfigError("unknown system '" + name + "'");
}

std::vector<std::string> builtin_system_names() {
    return {"cat", "pcat", "henon", "henon_horseshoe", "linear", "baker", "rotation", "identity"};
}

}  // namespace katok
