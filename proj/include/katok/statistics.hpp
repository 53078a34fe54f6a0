#pragma once

#include <functional>
#include <string>
#include <vector>

#include "katok/cocycle.hpp"
#include "katok/dynamics.hpp"

namespace katok {

struct Observable {
    std::string name;
    std::function<double(const Point&)> eval;
    double sup_norm = 0.0;  // bound over the working domain
};

// Axis-aligned grid partition with cell side rho/(2 sqrt 2), diameter < rho/2.
struct Partition {
    Domain domain;
    double side = 0.0;
    long nx = 0, ny = 0;

    long cell_count() const { return nx * ny; }
    double cell_diameter() const { return side * 1.4142135623730951; }
    long locate(const Point& p) const;
};

// Outcome of one Egorov-style selection sweep over the n-grid.
struct SelectionResult {
    std::vector<long> members;  // indices into the master orbit
    long threshold_n = 0;       // accepted n_* from the grid
    double fraction = 0.0;      // |members| / candidates
    double r = 0.0;
    double delta = 0.0;
};

// Shared Egorov-style sweep: qualifies(i, n) tests candidate i at window n;
// accepts the smallest grid value n_* with fraction >= 1-delta of candidates
// passing at every tested n >= n_*. Members are candidate positions 0..count-1.
SelectionResult egorov_selection(long candidate_count, const std::vector<long>& n_grid,
                                 double delta, double r,
                                 const std::function<bool(long, long)>& qualifies);

// S_n phi(x) = sum_{k=0}^{n-1} phi(f^k x).
double birkhoff_sum(const OrbitSegment& orbit, const Observable& phi, long index, long n);

// Gamma_J: indices where the finite-time unstable Jacobian exponent stays
// within r of the sum of positive exponents for all tested n >= n_J.
SelectionResult select_gamma_j(const SplittingField& field, double chi_plus_sum, double delta,
                               double r, const std::vector<long>& n_grid);

// Gamma_B: indices whose Birkhoff averages of phi stay within r of the
// full-orbit empirical average for all tested n >= n_B.
SelectionResult select_gamma_b(const OrbitSegment& orbit, const Observable& phi, double delta,
                               double r, const std::vector<long>& n_grid);

Partition grid_partition(const Domain& domain, double rho);

// C = min{r, mu(P_i)/4 : positive-mass cells}.
double recurrence_constant(const std::vector<double>& cell_masses, double r);

// Gamma_R: indices x with, for every tested n >= n_R, some k in
// {n,...,floor(n+rn)} with f^k(x) in P(x) and index x+k in the target set F.
SelectionResult select_gamma_r(const OrbitSegment& orbit, const Partition& partition,
                               const std::vector<long>& target, double delta, double r,
                               const std::vector<long>& n_grid);

// Default Egorov n-grid.
std::vector<long> default_n_grid();

}  // namespace katok
