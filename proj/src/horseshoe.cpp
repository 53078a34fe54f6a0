#include "katok/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "katok/errors.hpp"

namespace katok {

long ReturnBuckets::total() const {
    long sum = 0;
    for (const auto& [k, members] : buckets) sum += static_cast<long>(members.size());
    return sum;
}

bool Theorem1Ledger::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const Theorem1Item& it) { return it.pass; });
}

const Theorem1Item& Theorem1Ledger::find(const std::string& name) const {
    for (const Theorem1Item& it : items)
        if (it.name == name) return it;
    throw OutOfRangeError("no ledger item named '" + name + "'");
}

ReturnBuckets bucket_by_return(const SeparatedSet& E, const OrbitSegment& orbit,
                               const Partition& partition, const std::vector<long>& target, long n,
                               double r) {
    if (n < 1 || !(r > 0.0)) throw OutOfRangeError("bucketing needs n >= 1 and r > 0");
    ReturnBuckets rb;
    rb.n = n;
    rb.r = r;
    rb.window_lo = n;
    rb.window_hi = static_cast<long>(std::floor(static_cast<double>(n) * (1.0 + r)));
    const std::unordered_set<long> targ(target.begin(), target.end());

    for (long idx : E.indices) {
        const long cell = partition.locate(orbit.points[static_cast<std::size_t>(idx)]);
        bool placed = false;
        for (long k = rb.window_lo; k < rb.window_hi; ++k) {
            if (idx + k >= orbit.length()) break;
            if (partition.locate(orbit.points[static_cast<std::size_t>(idx + k)]) == cell &&
                targ.count(idx + k)) {
                rb.buckets[k].push_back(idx);  // smallest-k rule
                placed = true;
                break;
            }
        }
        if (!placed) ++rb.dropped;
    }
    if (rb.buckets.empty())
        throw AllDroppedError("every point failed to return; raise n_R or widen the target set");
    return rb;
}

long select_return_time(const ReturnBuckets& buckets) {
    long best_k = -1, best_count = 0;
    for (const auto& [k, members] : buckets.buckets)  // ascending k: ties keep the smallest
        if (static_cast<long>(members.size()) > best_count) {
            best_k = k;
            best_count = static_cast<long>(members.size());
        }
    if (best_k < 0) throw EmptyBucketsError("no nonempty return bucket");
    return best_k;
}

std::pair<long, std::vector<long>> select_base_rectangle(const std::vector<long>& f_m,
                                                         const OrbitSegment& orbit,
                                                         const Partition& partition,
                                                         const RectangleCover& cover) {
    // Count F_m members sharing the partition cell of each center x_i; such
    // members are within the cell diameter rho/2 of x_i, hence inside
    // B(x_i, rho) and the rectangle R(x_i).
    std::unordered_map<long, std::vector<long>> by_cell;
    for (long idx : f_m)
        by_cell[partition.locate(orbit.points[static_cast<std::size_t>(idx)])].push_back(idx);

    long best = -1, best_count = 0;
    for (long i = 0; i < cover.size(); ++i) {
        const long cell =
            partition.locate(cover.rectangles[static_cast<std::size_t>(i)].center);
        const auto it = by_cell.find(cell);
        const long count = it == by_cell.end() ? 0 : static_cast<long>(it->second.size());
        if (count > best_count) {  // strict >: ties keep the smallest index
            best = i;
            best_count = count;
        }
    }
    if (best < 0) throw EmptySelectionError("no cover rectangle's cell contains any F_m point");
    return {best,
            by_cell.at(partition.locate(cover.rectangles[static_cast<std::size_t>(best)].center))};
}

HorseshoeDescription assemble_horseshoe(const SystemSpec& system, const OrbitSegment& orbit,
                                        const SplittingField& field, const RectangleCover& cover,
                                        long base_index, const std::vector<long>& symbol_indices,
                                        long m, double r, int grid) {
    if (static_cast<long>(symbol_indices.size()) < 2)
        throw InsufficientSymbolsError(
            "need N >= 2 symbols; raise n, lower epsilon, or coarsen delta");
    if (base_index < 0 || base_index >= cover.size())
        throw OutOfRangeError("base rectangle index outside the cover");
    const Rectangle& rect = cover.rectangles[static_cast<std::size_t>(base_index)];

    HorseshoeDescription desc;
    desc.base_index = base_index;
    desc.m = m;
    desc.hat_iterates = m;
    desc.cover_size = cover.size();

    // The L^s-rectangle through a symbol is the f^{-m}-preimage component of
    // the base rectangle, with u-half-width h e^{-log Jac^u(f^m)} around the
    // symbol's u-coordinate (measured contraction; the certified lambda^m is
    // inflated by e^{m gamma} and rejects genuinely disjoint strips at desk
    // scale). Symbols whose strips overlap an already accepted one are pruned.
    struct Strip {
        long idx;
        double u, half;
    };
    std::vector<Strip> strips;
    for (long idx : symbol_indices) {
        const Point p = orbit.points[static_cast<std::size_t>(idx)];
        if (!rect.contains(system.domain, p))
            throw OutOfRangeError("symbol point outside the base rectangle");
        const double half = rect.h * std::exp(-field.log_unstable_jacobian(idx, m));
        strips.push_back({idx, rect.to_chart(system.domain, p).y, half});
    }
    std::vector<Strip> kept;
    for (const Strip& s : strips) {
        bool disjoint = true;
        for (const Strip& k : kept)
            if (std::abs(s.u - k.u) <= s.half + k.half) {
                disjoint = false;
                break;
            }
        if (disjoint) kept.push_back(s);
        else ++desc.overlap_dropped;
    }
    if (static_cast<long>(kept.size()) < 2)
        throw ComponentOverlapError(
            "stable strips overlap: separation epsilon too small for the rectangle");

    for (const Strip& s : kept) {
        desc.symbol_indices.push_back(s.idx);
        desc.symbol_points.push_back(orbit.points[static_cast<std::size_t>(s.idx)]);
        desc.checks.push_back(
            return_rectangle_check(system, orbit, field, cover, s.idx, m, r, grid));
    }

    desc.entropy = std::log(static_cast<double>(desc.symbol_count())) / static_cast<double>(m);
    desc.mixing_certified = true;  // full shift: all-ones transition matrix
    return desc;
}

EmpiricalMeasure horseshoe_measure(const SystemSpec& system, const HorseshoeDescription& desc) {
    std::vector<Point> pts;
    for (const Point& x : desc.symbol_points) {
        Point p = x;
        for (long k = 0; k < desc.m; ++k) {
            pts.push_back(p);
            p = system.domain.canonicalize(system.forward(p));
        }
    }
    return EmpiricalMeasure::uniform(std::move(pts));
}

Theorem1Ledger verify_theorem1(const SystemSpec& system, HorseshoeDescription& desc,
                               const OrbitSegment& orbit, const SplittingField& field,
                               const TestBasis& basis, const Theorem1Config& config) {
    const double e = config.e_target;
    const double r = config.r;
    Theorem1Ledger led;

    led.items.push_back({"i-mixing", desc.mixing_certified, desc.mixing_certified ? 1.0 : 0.0, 0.0,
                         0.0, "all-ones transition matrix of the full shift"});

    // ii) one-sided Hausdorff distance from the symbol orbit segments to a
    // subsample of the master orbit's point cloud.
    {
        const long stride = std::max<long>(1, orbit.length() / config.proximity_samples);
        double worst = 0.0;
        for (const Point& x : desc.symbol_points) {
            Point p = x;
            for (long k = 0; k < desc.m; ++k) {
                double nearest = 1e300;
                for (long j = 0; j < orbit.length(); j += stride)
                    nearest = std::min(
                        nearest, system.domain.distance(p, orbit.points[static_cast<std::size_t>(j)]));
                worst = std::max(worst, nearest);
                p = system.domain.canonicalize(system.forward(p));
            }
        }
        led.items.push_back({"ii-support", worst < r, worst, 0.0, r,
                             "sup over symbol orbits of the distance to the master cloud"});
    }

    const EmpiricalMeasure mu = EmpiricalMeasure::from_orbit(orbit);

    // iii) weak* proximity of the uniform-Bernoulli shift measure.
    {
        const EmpiricalMeasure nu = horseshoe_measure(system, desc);
        const double d = weak_star_distance(nu, mu, basis, config.weak_star_terms);
        led.items.push_back({"iii-weakstar", d < r, d, 0.0, r, "d(nu, mu) over the test basis"});
    }

    // iv) entropy window from the proof's two displays.
    {
        const double ell = static_cast<double>(std::max<long>(1, desc.cover_size));
        const double lower = e - r * (4.0 + e) -
                             (std::log(ell) + std::abs(std::log(1.0 - 5.0 * config.delta))) /
                                 static_cast<double>(desc.m);
        const double upper = e + r;
        const bool pass = desc.entropy >= lower && desc.entropy <= upper;
        const bool strong = std::abs(desc.entropy - e) < r;
        led.items.push_back({"iv-entropy", pass, desc.entropy, lower, upper,
                             strong ? "strong |h-e|<r also holds" : "strong |h-e|<r fails"});
    }

    // v) pressure window for every basis member.
    {
        bool all = true;
        double min_margin = 1e300;
        for (long i = 0; i < config.weak_star_terms; ++i) {
            const ItemVResult res =
                verify_item_v(system, desc, basis.members[static_cast<std::size_t>(i)], mu, e, r);
            all = all && res.proof_window;
            min_margin = std::min(min_margin, std::min(res.margin_low, res.margin_high));
        }
        led.items.push_back({"v-pressure", all, min_margin, 0.0, 0.0,
                             "min two-sided margin over the tested basis members"});
    }

    // vi) unstable Jacobian exponent of every symbol point.
    {
        double worst = 0.0;
        for (long idx : desc.symbol_indices)
            worst = std::max(worst, std::abs(field.psi(idx, desc.m) - config.chi_plus_sum));
        led.items.push_back({"vi-jacobian", worst < r, worst, 0.0, r,
                             "max |(1/m) log Jac^u - sum of positive exponents|"});
    }

    desc.ledger = led;
    return led;
}

}  // namespace katok
