#include "katok/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "katok/errors.hpp"

namespace katok {

bool bowen_ball_contains(const SystemSpec& system, const Point& x, const Point& y, long n,
                         double epsilon) {
    if (n < 1) throw OutOfRangeError("Bowen ball needs n >= 1");
    Point a = system.domain.canonicalize(x);
    Point b = system.domain.canonicalize(y);
    for (long k = 0; k < n; ++k) {
        if (system.domain.distance(a, b) > epsilon) return false;
        if (k + 1 < n) {
            a = system.domain.canonicalize(system.forward(a));
            b = system.domain.canonicalize(system.forward(b));
        }
    }
    return true;
}

namespace {

// Exact spatial filter on time-0 positions: a Bowen ball is contained in the
// plain epsilon-ball at k = 0, so only hash-neighbors can be deleted. Cell
// side >= epsilon, so matches live in the 3x3 neighborhood (with torus wrap).
class Time0Hash {
  public:
    Time0Hash(const Domain& dom, const std::vector<Point>& pts, double epsilon) : dom_(dom) {
        nx_ = std::max<long>(1, static_cast<long>(std::floor(dom.width(0) / epsilon)));
        ny_ = std::max<long>(1, static_cast<long>(std::floor(dom.width(1) / epsilon)));
        for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(cell(pts[i]))].push_back(static_cast<long>(i));
    }

    // Candidate ids in the 3x3 cell neighborhood of p.
    std::vector<long> neighbors(const Point& p) const {
        const auto [cx, cy] = cell(p);
        std::vector<long> out;
        for (long dx = -1; dx <= 1; ++dx) {
            long ax = cx + dx;
            if (dom_.kind == DomainKind::Torus)
                ax = (ax % nx_ + nx_) % nx_;
            else if (ax < 0 || ax >= nx_)
                continue;
            for (long dy = -1; dy <= 1; ++dy) {
                long ay = cy + dy;
                if (dom_.kind == DomainKind::Torus)
                    ay = (ay % ny_ + ny_) % ny_;
                else if (ay < 0 || ay >= ny_)
                    continue;
                const auto it = buckets_.find(key({ax, ay}));
                if (it == buckets_.end()) continue;
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

  private:
    std::pair<long, long> cell(const Point& p) const {
        const Point q = dom_.canonicalize(p);
        const long cx = std::clamp(
            static_cast<long>((q.x - dom_.lo.x) / dom_.width(0) * static_cast<double>(nx_)), 0L,
            nx_ - 1);
        const long cy = std::clamp(
            static_cast<long>((q.y - dom_.lo.y) / dom_.width(1) * static_cast<double>(ny_)), 0L,
            ny_ - 1);
        return {cx, cy};
    }
    long key(const std::pair<long, long>& c) const { return c.first * ny_ + c.second; }

    const Domain& dom_;
    long nx_ = 1, ny_ = 1;
    std::unordered_map<long, std::vector<long>> buckets_;
};

// The textbook greedy loop over candidate positions 0..count-1, with
// in_ball(a, b) testing whether candidate b lies in B_n(candidate a, eps).
std::vector<long> greedy_core(const Domain& dom, const std::vector<Point>& time0, double epsilon,
                              const std::function<bool(long, long)>& in_ball) {
    std::vector<char> alive(time0.size(), 1);
    std::vector<long> members;
    const Time0Hash hash(dom, time0, epsilon);
    for (std::size_t i = 0; i < time0.size(); ++i) {
        if (!alive[i]) continue;
        members.push_back(static_cast<long>(i));
        for (long j : hash.neighbors(time0[i])) {
            if (!alive[static_cast<std::size_t>(j)]) continue;
            if (in_ball(static_cast<long>(i), j)) alive[static_cast<std::size_t>(j)] = 0;
        }
    }
    return members;
}

}  // namespace

SeparatedSet greedy_separated_set(const SystemSpec& system, const std::vector<Point>& candidates,
                                  long n, double epsilon) {
    if (candidates.empty()) throw OutOfRangeError("empty candidate list");
    SeparatedSet set;
    set.n = n;
    set.epsilon = epsilon;
    // Precompute trajectories once; the pairwise tests then index into them.
    std::vector<std::vector<Point>> traj(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        traj[i].reserve(static_cast<std::size_t>(n));
        Point p = system.domain.canonicalize(candidates[i]);
        for (long k = 0; k < n; ++k) {
            traj[i].push_back(p);
            if (k + 1 < n) p = system.domain.canonicalize(system.forward(p));
        }
    }
    std::vector<Point> time0(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) time0[i] = traj[i][0];
    const auto members = greedy_core(system.domain, time0, epsilon, [&](long a, long b) {
        for (long k = 0; k < n; ++k)
            if (system.domain.distance(traj[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)],
                                       traj[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)]) >
                epsilon)
                return false;
        return true;
    });
    for (long i : members) {
        set.points.push_back(time0[static_cast<std::size_t>(i)]);
        set.indices.push_back(i);
    }
    return set;
}

SeparatedSet greedy_separated_set(const SystemSpec& system, const OrbitSegment& orbit,
                                  const std::vector<long>& candidates, long n, double epsilon) {
    if (candidates.empty()) throw OutOfRangeError("empty candidate list");
    std::vector<Point> time0(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] < 0 || candidates[i] + n > orbit.length())
            throw OutOfRangeError("candidate orbit segment exceeds the orbit");
        time0[i] = orbit.points[static_cast<std::size_t>(candidates[i])];
    }
    const auto members = greedy_core(system.domain, time0, epsilon, [&](long a, long b) {
        const long ia = candidates[static_cast<std::size_t>(a)];
        const long ib = candidates[static_cast<std::size_t>(b)];
        for (long k = 0; k < n; ++k)
            if (system.domain.distance(orbit.points[static_cast<std::size_t>(ia + k)],
                                       orbit.points[static_cast<std::size_t>(ib + k)]) > epsilon)
                return false;
        return true;
    });
    SeparatedSet set;
    set.n = n;
    set.epsilon = epsilon;
    for (long i : members) {
        set.points.push_back(time0[static_cast<std::size_t>(i)]);
        set.indices.push_back(candidates[static_cast<std::size_t>(i)]);
    }
    return set;
}

namespace {

// For probe orbit-index p and sample orbit-index j, the largest k <= cap with
// d(f^t x_p, f^t x_j) <= eps for all t < k.
long bowen_run_length(const Domain& dom, const OrbitSegment& orbit, long p, long j, double eps,
                      long cap) {
    for (long t = 0; t < cap; ++t)
        if (dom.distance(orbit.points[static_cast<std::size_t>(p + t)],
                         orbit.points[static_cast<std::size_t>(j + t)]) > eps)
            return t;
    return cap;
}

// Bowen-ball masses for all probes at every n in `ns` (sorted ascending),
// estimated as subsampled master-orbit frequencies.
std::vector<std::vector<double>> bowen_masses(const SystemSpec& system, const OrbitSegment& orbit,
                                              const std::vector<long>& probes,
                                              const std::vector<long>& ns, double eps,
                                              long stride) {
    const long max_n = ns.back();
    const long limit = orbit.length() - max_n;
    if (limit <= 0) throw OutOfRangeError("orbit shorter than the largest Bowen window");
    std::vector<std::vector<long>> counts(probes.size(), std::vector<long>(ns.size(), 0));
    long samples = 0;
    for (long j = 0; j < limit; j += stride) {
        ++samples;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const long run =
                bowen_run_length(system.domain, orbit, probes[pi], j, eps, max_n);
            for (std::size_t k = ns.size(); k-- > 0;) {
                if (ns[k] > run) continue;
                ++counts[pi][k];
                // run >= ns[k] implies run >= all smaller entries too
                for (std::size_t k2 = 0; k2 < k; ++k2) ++counts[pi][k2];
                break;
            }
        }
    }
    std::vector<std::vector<double>> mass(probes.size(), std::vector<double>(ns.size(), 0.0));
    for (std::size_t pi = 0; pi < probes.size(); ++pi)
        for (std::size_t k = 0; k < ns.size(); ++k)
            mass[pi][k] = static_cast<double>(counts[pi][k]) / static_cast<double>(samples);
    return mass;
}

}  // namespace

BrinKatokEstimate brin_katok_entropy(const SystemSpec& system, const OrbitSegment& orbit,
                                     const std::vector<long>& probes, const std::vector<long>& ns,
                                     const std::vector<double>& epsilons, long stride) {
    if (probes.size() < 30) throw OutOfRangeError("need at least 30 probes");
    if (ns.empty() || epsilons.empty()) throw OutOfRangeError("empty n or epsilon list");
    std::vector<long> ns_sorted = ns;
    std::sort(ns_sorted.begin(), ns_sorted.end());
    for (long p : probes)
        if (p < 0 || p + ns_sorted.back() > orbit.length())
            throw OutOfRangeError("probe window exceeds the orbit");

    BrinKatokEstimate est;
    bool have_headline = false;
    long total_nonempty = 0;
    std::vector<double> eps_sorted = epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());  // ascending: smallest first

    for (double eps : eps_sorted) {
        const auto mass = bowen_masses(system, orbit, probes, ns_sorted, eps, stride);
        std::vector<double> xs, ys;  // (n, mean log mass) of usable cells
        for (std::size_t k = 0; k < ns_sorted.size(); ++k) {
            BrinKatokCell cell;
            cell.n = ns_sorted[k];
            cell.epsilon = eps;
            cell.probes = static_cast<long>(probes.size());
            double log_sum = 0.0;
            long nonempty = 0;
            for (std::size_t pi = 0; pi < probes.size(); ++pi) {
                if (mass[pi][k] > 0.0) {
                    log_sum += std::log(mass[pi][k]);
                    ++nonempty;
                }
            }
            cell.empty_probes = cell.probes - nonempty;
            total_nonempty += nonempty;
            if (nonempty > 0) {
                cell.mean_log_mass = log_sum / static_cast<double>(nonempty);
                cell.estimate = -cell.mean_log_mass / static_cast<double>(cell.n);
            }
            // Usable for the slope fit when empties are rare enough not to
            // bias the conditional geometric mean.
            if (cell.empty_probes * 5 <= cell.probes) {
                xs.push_back(static_cast<double>(cell.n));
                ys.push_back(cell.mean_log_mass);
            }
            est.table.push_back(cell);
        }
        if (!have_headline && xs.size() >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(xs.size());
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                num += (xs[i] - mx) * (ys[i] - my);
                den += (xs[i] - mx) * (xs[i] - mx);
            }
            est.headline = -num / den;
            est.headline_epsilon = eps;
            have_headline = true;
        }
    }
    if (total_nonempty == 0) throw EmptyBallError("every Bowen-ball estimate is zero");
    if (!have_headline)
        throw EmptyBallError("no epsilon has two usable n values for the slope fit");
    return est;
}

SelectionResult select_gamma_e(const SystemSpec& system, const OrbitSegment& orbit,
                               const std::vector<long>& probes, double delta, double e_target,
                               double r, double epsilon, const std::vector<long>& n_grid,
                               long stride) {
    if (probes.empty()) throw SelectionFailureError("no probes");
    std::vector<long> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    for (long p : probes)
        if (p < 0 || p + grid.back() > orbit.length())
            throw OutOfRangeError("probe window exceeds the orbit");
    const auto mass = bowen_masses(system, orbit, probes, grid, epsilon, stride);
    std::unordered_map<long, std::size_t> col;
    for (std::size_t k = 0; k < grid.size(); ++k) col[grid[k]] = k;

    SelectionResult res = egorov_selection(
        static_cast<long>(probes.size()), grid, delta, r, [&](long i, long n) {
            const double m = mass[static_cast<std::size_t>(i)][col.at(n)];
            const double nn = static_cast<double>(n);
            return m >= std::exp(-nn * (e_target + r)) && m <= std::exp(-nn * (e_target - r));
        });
    for (long& i : res.members) i = probes[static_cast<std::size_t>(i)];
    return res;
}

std::pair<bool, bool> separated_count_bounds(long cardE, long n, double e_target, double r,
                                             double delta) {
    if (cardE < 1) throw OutOfRangeError("cardE must be >= 1");
    const double log_card = std::log(static_cast<double>(cardE));
    const double nn = static_cast<double>(n);
    const bool lower = std::log(1.0 - 5.0 * delta) + nn * (e_target - r) <= log_card;
    const bool upper = log_card <= nn * (e_target + r);
    return {lower, upper};
}

}  // namespace katok
