#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "katok/linalg.hpp"

namespace katok {

enum class DomainKind { Torus, Box };

// Geometry of the phase space. Torus points live in [0,1)^2 with the quotient
// metric; box points use the Euclidean metric on the region.
struct Domain {
    DomainKind kind = DomainKind::Torus;
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};

    Vec2 canonicalize(const Vec2& p) const;
    // Shortest displacement from a to b (torus: minimum over integer translates).
    Vec2 displacement(const Vec2& a, const Vec2& b) const;
    double distance(const Vec2& a, const Vec2& b) const;
    double width(int axis) const { return axis == 0 ? hi.x - lo.x : hi.y - lo.y; }
};

using Point = Vec2;  // canonicalization is handled through Domain

// A concrete invertible smooth planar map with analytic derivative.
struct SystemSpec {
    std::string name;
    Domain domain;
    std::function<Vec2(const Vec2&)> forward;
    std::function<Vec2(const Vec2&)> inverse;  // may be empty
    std::function<Mat2(const Vec2&)> derivative;
    std::optional<std::vector<double>> known_spectrum;  // nats per iterate, ascending

    bool has_inverse() const { return static_cast<bool>(inverse); }
};

struct OrbitSegment {
    std::string system_name;
    Point base;
    std::uint64_t seed = 0;
    long burn_in = 0;
    std::vector<Point> points;  // points[k+1] = forward(points[k])

    long length() const { return static_cast<long>(points.size()); }
};

// f^k(x); k may be negative when the system has an inverse.
Point step(const SystemSpec& system, const Point& x, long k);

// Jacobian of the forward map at x.
Mat2 derivative(const SystemSpec& system, const Point& x);

// Central finite-difference Jacobian, the independent check of the analytic one.
Mat2 derivative_fd(const SystemSpec& system, const Point& x, double h = 1e-6);

// Orbit of a burned-in seeded random initial point; deterministic per seed.
OrbitSegment sample_orbit(const SystemSpec& system, std::uint64_t seed, long burn_in, long length);

// Built-in systems selectable by name: cat, pcat (kappa), henon (a, b),
// henon_horseshoe, linear, baker, rotation (alpha, beta), identity.
SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_system_names();

}  // namespace katok
