#include "katok/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "katok/errors.hpp"

namespace katok {

std::vector<long> default_n_grid() { return {50, 100, 200, 500, 1000, 2000}; }

double birkhoff_sum(const OrbitSegment& orbit, const Observable& phi, long index, long n) {
    if (n < 1 || index < 0 || index + n > orbit.length())
        throw OutOfRangeError("birkhoff_sum window exceeds the orbit");
    double sum = 0.0;
    for (long k = 0; k < n; ++k) sum += phi.eval(orbit.points[static_cast<std::size_t>(index + k)]);
    return sum;
}

// qualifies(i, n) says whether candidate i passes the defining inequality at
// window n; accepts the smallest grid value n_* such that at least 1-delta of
// the candidates pass for every tested n >= n_*.
SelectionResult egorov_selection(long candidate_count, const std::vector<long>& n_grid, double delta,
                             double r, const std::function<bool(long, long)>& qualifies) {
    if (n_grid.empty()) throw SelectionFailureError("empty n-grid");
    std::vector<long> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    if (candidate_count <= 0) throw SelectionFailureError("no candidate indices fit the n-grid");

    // ok[j][i] for grid value j; suffix-AND gives qualification for n_* = grid[j].
    std::vector<std::vector<char>> ok(grid.size(), std::vector<char>(candidate_count));
    for (std::size_t j = 0; j < grid.size(); ++j)
        for (long i = 0; i < candidate_count; ++i) ok[j][i] = qualifies(i, grid[j]) ? 1 : 0;
    for (std::size_t j = grid.size() - 1; j-- > 0;)
        for (long i = 0; i < candidate_count; ++i) ok[j][i] = ok[j][i] && ok[j + 1][i];

    for (std::size_t j = 0; j < grid.size(); ++j) {
        long count = 0;
        for (long i = 0; i < candidate_count; ++i) count += ok[j][i];
        const double fraction = static_cast<double>(count) / static_cast<double>(candidate_count);
        if (fraction >= 1.0 - delta) {
            SelectionResult res;
            res.threshold_n = grid[j];
            res.fraction = fraction;
            res.r = r;
            res.delta = delta;
            res.members.reserve(static_cast<std::size_t>(count));
            for (long i = 0; i < candidate_count; ++i)
                if (ok[j][i]) res.members.push_back(i);
            return res;
        }
    }
    throw SelectionFailureError("no n in the grid reaches fraction 1-delta");
}

SelectionResult select_gamma_j(const SplittingField& field, double chi_plus_sum, double delta,
                               double r, const std::vector<long>& n_grid) {
    const long max_n = *std::max_element(n_grid.begin(), n_grid.end());
    const long lo = field.valid_from;
    const long hi = field.valid_to - max_n;
    SelectionResult res = egorov_selection(
        std::max<long>(0, hi - lo), n_grid, delta, r,
        [&](long i, long n) { return std::abs(field.psi(lo + i, n) - chi_plus_sum) <= r; });
    for (long& i : res.members) i += lo;
    return res;
}

SelectionResult select_gamma_b(const OrbitSegment& orbit, const Observable& phi, double delta,
                               double r, const std::vector<long>& n_grid) {
    const long len = orbit.length();
    std::vector<double> prefix(static_cast<std::size_t>(len) + 1, 0.0);
    for (long k = 0; k < len; ++k)
        prefix[static_cast<std::size_t>(k) + 1] =
            prefix[static_cast<std::size_t>(k)] + phi.eval(orbit.points[static_cast<std::size_t>(k)]);
    const double mean = prefix[static_cast<std::size_t>(len)] / static_cast<double>(len);

    const long max_n = *std::max_element(n_grid.begin(), n_grid.end());
    return egorov_selection(std::max<long>(0, len - max_n), n_grid, delta, r, [&](long i, long n) {
        const double avg = (prefix[static_cast<std::size_t>(i + n)] -
                            prefix[static_cast<std::size_t>(i)]) /
                           static_cast<double>(n);
        return std::abs(avg - mean) <= r;
    });
}

Partition grid_partition(const Domain& domain, double rho) {
    if (!(rho > 0.0)) throw OutOfRangeError("rho must be positive");
    Partition part;
    part.domain = domain;
    part.side = rho / (2.0 * std::sqrt(2.0));
    part.nx = static_cast<long>(std::ceil(domain.width(0) / part.side));
    part.ny = static_cast<long>(std::ceil(domain.width(1) / part.side));
    if (part.nx <= 0 || part.ny <= 0) throw OutOfRangeError("degenerate domain");
    if (part.cell_count() > 100000000L) throw TooFineError("partition would exceed 10^8 cells");
    return part;
}

long Partition::locate(const Point& p) const {
    const Point q = domain.canonicalize(p);
    const long ix = std::clamp(static_cast<long>((q.x - domain.lo.x) / side), 0L, nx - 1);
    const long iy = std::clamp(static_cast<long>((q.y - domain.lo.y) / side), 0L, ny - 1);
    return ix * ny + iy;
}

double recurrence_constant(const std::vector<double>& cell_masses, double r) {
    const double total = std::accumulate(cell_masses.begin(), cell_masses.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw OutOfRangeError("cell masses must sum to 1");
    double c = r;
    for (double m : cell_masses)
        if (m > 0.0) c = std::min(c, m / 4.0);
    return c;
}

SelectionResult select_gamma_r(const OrbitSegment& orbit, const Partition& partition,
                               const std::vector<long>& target, double delta, double r,
                               const std::vector<long>& n_grid) {
    if (target.empty()) throw SelectionFailureError("empty target set F");
    const long len = orbit.length();
    std::vector<long> cell(static_cast<std::size_t>(len));
    for (long i = 0; i < len; ++i)
        cell[static_cast<std::size_t>(i)] = partition.locate(orbit.points[static_cast<std::size_t>(i)]);

    // Per cell, the sorted target indices landing in it: the return test
    // becomes one binary search per (index, n).
    std::unordered_map<long, std::vector<long>> cell_targets;
    for (long j : target) {
        if (j < 0 || j >= len) throw OutOfRangeError("target index outside the orbit");
        cell_targets[cell[static_cast<std::size_t>(j)]].push_back(j);
    }
    for (auto& [c, v] : cell_targets) std::sort(v.begin(), v.end());

    const long max_n = *std::max_element(n_grid.begin(), n_grid.end());
    const long max_window = max_n + static_cast<long>(std::floor(r * static_cast<double>(max_n)));
    return egorov_selection(std::max<long>(0, len - max_window - 1), n_grid, delta, r,
                        [&](long i, long n) {
                            const auto it = cell_targets.find(cell[static_cast<std::size_t>(i)]);
                            if (it == cell_targets.end()) return false;
                            const long k_lo = i + n;
                            const long k_hi =
                                i + n + static_cast<long>(std::floor(r * static_cast<double>(n)));
                            const auto pos =
                                std::lower_bound(it->second.begin(), it->second.end(), k_lo);
                            return pos != it->second.end() && *pos <= k_hi;
                        });
}

}  // namespace katok
