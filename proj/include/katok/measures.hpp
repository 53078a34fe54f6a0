#pragma once

#include <string>
#include <utility>
#include <vector>

#include "katok/dynamics.hpp"
#include "katok/statistics.hpp"

namespace katok {

struct HorseshoeDescription;  // horseshoe.hpp

// Weighted point-mass proxy for an invariant measure.
struct EmpiricalMeasure {
    std::vector<Point> points;
    std::vector<double> weights;  // positive, sum 1 within 1e-12

    double integrate(const Observable& phi) const;
    void validate() const;

    static EmpiricalMeasure uniform(std::vector<Point> pts);
    static EmpiricalMeasure from_orbit(const OrbitSegment& orbit);
};

// Countable test-function family with known sup norms, ordered by total
// degree: 1, cos 2pi x, sin 2pi x, cos 2pi y, sin 2pi y, cos 2pi(x+y), ...
struct TestBasis {
    std::vector<Observable> members;

    long size() const { return static_cast<long>(members.size()); }
};

// Trigonometric monomials on the torus; every sup norm is exactly 1.
TestBasis trig_basis(long count);

// Chebyshev products rescaled to a box domain; sup norms from a 256^2 grid
// sweep with a 1e-3 safety inflation.
TestBasis chebyshev_basis(const Domain& domain, long count);

// sum_{i=1}^{terms} 2^{-i} (1 / 2||psi_i||) |int psi_i dmu - int psi_i dnu|.
double weak_star_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          const TestBasis& basis, long terms);

// Truncation tail bound of the series above.
double weak_star_tail(long terms);

struct KAndR0 {
    long K = 0;
    double r0 = 0.0;
};

// K = smallest integer with 2^{-K+1} < r/2; r0 = largest value in (0, r) with
// r0 (1 - 2^{-K}) (1/2) max_{i<=K} ||psi_i||^{-1} < r/2. If a density family
// is supplied, K is enlarged until every family member is within r (sampled
// sup distance) of some psi_i with i <= K.
KAndR0 choose_K_r0(double r, const TestBasis& basis,
                   const std::vector<Observable>& density_family = {});

// Empirical sup of |phi(x) - phi(y)| over the supplied pairs at distance
// <= eps0 (farther pairs are ignored).
double modulus_of_continuity(const Domain& domain, const Observable& phi, double eps0,
                             const std::vector<std::pair<Point, Point>>& pairs);

struct PressureEstimate {
    double value = 0.0;   // nats per f-iterate
    std::string method;   // "variational" | "partition-function"
    long window = 0;      // m (variational) or n (partition function)
    double epsilon = 0.0; // partition-function scale
    long support = 0;     // symbols, or separated-set cardinality
};

// Full-shift equilibrium value for a cylinder-constant potential: the shift
// model carries N symbols at step m, phi is given the value S_m phi(symbol
// point) on its 1-cylinder, and P = (1/m) log sum_j e^{S_m phi(x_j)}.
PressureEstimate pressure_variational(const SystemSpec& system, const HorseshoeDescription& desc,
                                      const Observable& phi);

// Separated-set pressure (1/n) log sum_{x in greedy set} e^{S_n phi(x)}.
PressureEstimate pressure_partition_function(const SystemSpec& system,
                                             const std::vector<Point>& pool, const Observable& phi,
                                             long n, double epsilon);

struct ItemVResult {
    bool proof_window = false;  // e + int - r(7+e) <= P < e + int + 4r
    bool strong = false;        // |P - (e + int)| < r
    double pressure = 0.0;
    double integral = 0.0;      // int phi dmu
    double margin_low = 0.0;    // P minus the lower bound
    double margin_high = 0.0;   // upper bound minus P
};

ItemVResult verify_item_v(const SystemSpec& system, const HorseshoeDescription& desc,
                          const Observable& phi, const EmpiricalMeasure& mu, double e, double r);

}  // namespace katok
