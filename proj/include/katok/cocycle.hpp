#pragma once

#include <vector>

#include "katok/dynamics.hpp"

namespace katok {

struct LyapunovSpectrum {
    std::vector<double> exponents;      // distinct, strictly increasing, nats/iterate
    std::vector<int> multiplicities;    // summing to the dimension
    int count = 0;                      // s = number of distinct exponents
    double chi = 0.0;                   // min_j |chi_j|
    double chi_plus_sum = 0.0;          // sum of positive parts, with multiplicity
};

struct SplittingEstimate {
    long orbit_index = 0;
    Vec2 stable{0.0, 1.0};    // unit vector spanning E^s
    Vec2 unstable{1.0, 0.0};  // unit vector spanning E^u
    double angle = 0.0;       // angle between the two lines, in (0, pi/2]
    long window = 0;
};

// Finite-time exponents from QR-reorthonormalized cocycle products.
LyapunovSpectrum lyapunov_spectrum_qr(const SystemSpec& system, const OrbitSegment& orbit,
                                      long reorth_period = 1);

// Two-sided power method: E^u from the forward product started `window` iterates
// in the past, E^s from the inverse cocycle started `window` iterates ahead.
SplittingEstimate oseledets_splitting(const SystemSpec& system, const OrbitSegment& orbit,
                                      long index, long window);

struct UnstableJacobian {
    double jacobian = 1.0;  // |Jac df^n| restricted to E^u
    double psi_n = 0.0;     // (1/n) log jacobian
};

UnstableJacobian unstable_jacobian(const SystemSpec& system, const OrbitSegment& orbit, long index,
                                   long n, const SplittingEstimate& splitting);

// Geometric potential phi^u(x) = -log |Jac df restricted to E^u_x|.
double geometric_potential(const SystemSpec& system, const OrbitSegment& orbit, long index,
                           const SplittingEstimate& splitting);

// min_j |chi_j|; throws zero-exponent when hyperbolicity fails at the 1e-3 threshold.
double min_exponent_chi(const LyapunovSpectrum& spec);

// Per-index splitting data for a whole orbit, computed in two linear passes
// (forward transport for E^u, backward transport for E^s). Prefix sums of the
// one-step log rates make psi_n and Birkhoff sums of phi^u O(1) lookups.
struct SplittingField {
    std::vector<Vec2> stable;
    std::vector<Vec2> unstable;
    std::vector<double> angle;
    std::vector<double> log_expansion_prefix;    // prefix of log ||df(e^u_i)||, size len+1
    std::vector<double> log_contraction_prefix;  // prefix of log ||df(e^s_i)||, size len+1
    long valid_from = 0;  // directions are trustworthy on [valid_from, valid_to)
    long valid_to = 0;

    long length() const { return static_cast<long>(stable.size()); }
    double log_unstable_jacobian(long index, long n) const {
        return log_expansion_prefix[static_cast<std::size_t>(index + n)] -
               log_expansion_prefix[static_cast<std::size_t>(index)];
    }
    double psi(long index, long n) const { return log_unstable_jacobian(index, n) / static_cast<double>(n); }
    double phi_u(long index) const { return -log_unstable_jacobian(index, 1); }
};

SplittingField compute_splitting_field(const SystemSpec& system, const OrbitSegment& orbit,
                                       long transient = 200);

SplittingEstimate splitting_at(const SplittingField& field, long index);

}  // namespace katok
