#include "katok/cocycle.hpp"

#include <algorithm>
#include <cmath>

#include "katok/errors.hpp"

namespace katok {

LyapunovSpectrum lyapunov_spectrum_qr(const SystemSpec& system, const OrbitSegment& orbit,
                                      long reorth_period) {
    if (reorth_period < 1) throw OutOfRangeError("reorth_period must be >= 1");
    const long n = orbit.length();
    if (n < 10 * reorth_period) throw OutOfRangeError("orbit length must be >= 10 * reorth_period");

    // Let the orthogonal frame align with the Oseledets flag before averaging;
    // keeping the transient in the sums leaves an O(1/n) bias on the exponents.
    const long skip = std::min<long>(200, n / 10);

    double sum1 = 0.0, sum2 = 0.0;
    long steps = 0;
    Mat2 b = Mat2::identity();
    long pending = 0;
    for (long k = 0; k + 1 < n; ++k) {
        b = system.derivative(orbit.points[static_cast<std::size_t>(k)]) * b;
        ++pending;
        if (pending == reorth_period || k + 2 == n) {
            const QR2 qr = qr_decompose(b);
            if (!(qr.r.a > 0.0) || !(qr.r.d > 0.0) || !std::isfinite(qr.r.a) || !std::isfinite(qr.r.d))
                throw DegenerateCocycleError("triangular factor underflow in QR sweep");
            if (k >= skip) {
                sum1 += std::log(qr.r.a);
                sum2 += std::log(qr.r.d);
                steps += pending;
            }
            pending = 0;
            b = qr.q;
        }
    }
    double e1 = sum1 / static_cast<double>(steps);
    double e2 = sum2 / static_cast<double>(steps);
    if (e1 > e2) std::swap(e1, e2);

    LyapunovSpectrum spec;
    if (std::abs(e2 - e1) < 1e-8) {
        spec.exponents = {0.5 * (e1 + e2)};
        spec.multiplicities = {2};
    } else {
        spec.exponents = {e1, e2};
        spec.multiplicities = {1, 1};
    }
    spec.count = static_cast<int>(spec.exponents.size());
    spec.chi = std::abs(spec.exponents.front());
    spec.chi_plus_sum = 0.0;
    for (std::size_t j = 0; j < spec.exponents.size(); ++j) {
        spec.chi = std::min(spec.chi, std::abs(spec.exponents[j]));
        spec.chi_plus_sum += spec.multiplicities[j] * std::max(0.0, spec.exponents[j]);
    }
    return spec;
}

SplittingEstimate oseledets_splitting(const SystemSpec& system, const OrbitSegment& orbit,
                                      long index, long window) {
    if (index - window < 0 || index + window >= orbit.length())
        throw OutOfRangeError("window exceeds available orbit around index");

    // Unstable: push an arbitrary vector forward from index-window to index.
    Vec2 u{1.0, 0.37};  // not axis-aligned, avoids landing exactly on E^s
    double log_u = 0.0;
    for (long k = index - window; k < index; ++k) {
        u = system.derivative(orbit.points[static_cast<std::size_t>(k)]) * u;
        log_u += std::log(u.norm());
        u = u.normalized();
    }
    // Stable: pull an arbitrary vector backward from index+window to index.
    Vec2 s{0.37, 1.0};
    double log_s = 0.0;
    for (long k = index + window - 1; k >= index; --k) {
        s = system.derivative(orbit.points[static_cast<std::size_t>(k)]).inverse() * s;
        log_s += std::log(s.norm());
        s = s.normalized();
    }
    const double chi_u = log_u / static_cast<double>(window);
    const double chi_s = -log_s / static_cast<double>(window);  // forward rate along E^s
    if (std::min(chi_u, -chi_s) < 1e-3)
        throw NotHyperbolicError("no sign gap in window exponents (chi estimate < 1e-3)");

    SplittingEstimate est;
    est.orbit_index = index;
    est.unstable = u;
    est.stable = s;
    est.angle = line_angle(u, s);
    est.window = window;
    return est;
}

UnstableJacobian unstable_jacobian(const SystemSpec& system, const OrbitSegment& orbit, long index,
                                   long n, const SplittingEstimate& splitting) {
    if (n < 1) throw OutOfRangeError("n must be >= 1");
    if (index < 0 || index + n > orbit.length())
        throw OutOfRangeError("orbit too short for n forward iterates");
    Vec2 v = splitting.unstable;
    double log_jac = 0.0;
    for (long k = 0; k < n; ++k) {
        v = system.derivative(orbit.points[static_cast<std::size_t>(index + k)]) * v;
        log_jac += std::log(v.norm());
        v = v.normalized();
    }
    return {std::exp(log_jac), log_jac / static_cast<double>(n)};
}

double geometric_potential(const SystemSpec& system, const OrbitSegment& orbit, long index,
                           const SplittingEstimate& splitting) {
    const Vec2 v = system.derivative(orbit.points[static_cast<std::size_t>(index)]) * splitting.unstable;
    return -std::log(v.norm());
}

double min_exponent_chi(const LyapunovSpectrum& spec) {
    if (spec.exponents.empty()) throw OutOfRangeError("empty spectrum");
    double chi = std::abs(spec.exponents.front());
    for (double e : spec.exponents) chi = std::min(chi, std::abs(e));
    if (chi < 1e-3) throw ZeroExponentError("|chi_j| < 1e-3: hyperbolicity assumption violated");
    return chi;
}

SplittingField compute_splitting_field(const SystemSpec& system, const OrbitSegment& orbit,
                                       long transient) {
    const long n = orbit.length();
    SplittingField field;
    field.stable.resize(static_cast<std::size_t>(n));
    field.unstable.resize(static_cast<std::size_t>(n));
    field.angle.resize(static_cast<std::size_t>(n));
    field.log_expansion_prefix.assign(static_cast<std::size_t>(n) + 1, 0.0);
    field.log_contraction_prefix.assign(static_cast<std::size_t>(n) + 1, 0.0);
    field.valid_from = std::min(transient, n);
    field.valid_to = std::max<long>(0, n - transient);

    Vec2 u{1.0, 0.37};
    for (long k = 0; k < n; ++k) {
        field.unstable[static_cast<std::size_t>(k)] = u;
        if (k + 1 < n) u = (system.derivative(orbit.points[static_cast<std::size_t>(k)]) * u).normalized();
    }
    Vec2 s{0.37, 1.0};
    for (long k = n - 1; k >= 0; --k) {
        field.stable[static_cast<std::size_t>(k)] = s;
        if (k > 0) s = (system.derivative(orbit.points[static_cast<std::size_t>(k - 1)]).inverse() * s).normalized();
    }
    for (long k = 0; k < n; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        field.angle[i] = line_angle(field.stable[i], field.unstable[i]);
        const Mat2 df = system.derivative(orbit.points[i]);
        field.log_expansion_prefix[i + 1] = field.log_expansion_prefix[i] + std::log((df * field.unstable[i]).norm());
        field.log_contraction_prefix[i + 1] =
            field.log_contraction_prefix[i] + std::log((df * field.stable[i]).norm());
    }
    return field;
}

SplittingEstimate splitting_at(const SplittingField& field, long index) {
    SplittingEstimate est;
    est.orbit_index = index;
    est.stable = field.stable[static_cast<std::size_t>(index)];
    est.unstable = field.unstable[static_cast<std::size_t>(index)];
    est.angle = field.angle[static_cast<std::size_t>(index)];
    est.window = index - field.valid_from;
    return est;
}

}  // namespace katok
