#pragma once

#include <vector>

#include "katok/dynamics.hpp"
#include "katok/statistics.hpp"

namespace katok {

// An (n, epsilon)-separated set, maximal over its candidate pool: every pair
// is Bowen-separated, and every candidate sits in some member's Bowen ball.
struct SeparatedSet {
    std::vector<Point> points;   // in generation order
    std::vector<long> indices;   // master-orbit indices (or candidate positions)
    long n = 0;
    double epsilon = 0.0;

    long size() const { return static_cast<long>(points.size()); }
};

// True iff d(f^k x, f^k y) <= epsilon for all 0 <= k <= n-1.
bool bowen_ball_contains(const SystemSpec& system, const Point& x, const Point& y, long n,
                         double epsilon);

// The classical greedy loop over an arbitrary ordered candidate list: take the
// first remaining candidate, delete everything in its Bowen ball, repeat.
SeparatedSet greedy_separated_set(const SystemSpec& system, const std::vector<Point>& candidates,
                                  long n, double epsilon);

// Same loop with candidates given as master-orbit indices; Bowen distances
// become orbit lookups instead of fresh iterations.
SeparatedSet greedy_separated_set(const SystemSpec& system, const OrbitSegment& orbit,
                                  const std::vector<long>& candidates, long n, double epsilon);

struct BrinKatokCell {
    long n = 0;
    double epsilon = 0.0;
    double mean_log_mass = 0.0;  // log of the geometric mean over nonempty probes
    long probes = 0;
    long empty_probes = 0;       // flagged, excluded from the mean
    double estimate = 0.0;       // -(1/n) mean_log_mass
};

struct BrinKatokEstimate {
    double headline = 0.0;          // slope fit at the smallest usable epsilon
    double headline_epsilon = 0.0;
    std::vector<BrinKatokCell> table;
};

// Local-entropy estimator: Bowen-ball masses from master-orbit frequencies,
// geometric mean over probes, and per-epsilon slope of -log(mass) against n.
// The slope removes the epsilon-dependent area offset of the ball masses.
BrinKatokEstimate brin_katok_entropy(const SystemSpec& system, const OrbitSegment& orbit,
                                     const std::vector<long>& probes, const std::vector<long>& ns,
                                     const std::vector<double>& epsilons, long stride = 7);

// Gamma_E: probes whose Bowen-ball masses satisfy
// e^{-n(h+r)} <= mass <= e^{-n(h-r)} for all tested n >= n_E, h = e_target.
SelectionResult select_gamma_e(const SystemSpec& system, const OrbitSegment& orbit,
                               const std::vector<long>& probes, double delta, double e_target,
                               double r, double epsilon, const std::vector<long>& n_grid,
                               long stride = 7);

// ((1-5 delta) e^{n(e-r)} <= cardE, cardE <= e^{n(e+r)}).
std::pair<bool, bool> separated_count_bounds(long cardE, long n, double e_target, double r,
                                             double delta);

}  // namespace katok
