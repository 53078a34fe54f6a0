#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "katok/entropy.hpp"
#include "katok/errors.hpp"

using namespace katok;

namespace {

const double kCatChi = std::log((3.0 + std::sqrt(5.0)) / 2.0);

// Reference greedy: full pairwise Bowen tests, no spatial filtering.
std::vector<long> brute_force_greedy(const SystemSpec& system, const std::vector<Point>& cands,
                                     long n, double eps) {
    std::vector<char> alive(cands.size(), 1);
    std::vector<long> members;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!alive[i]) continue;
        members.push_back(static_cast<long>(i));
        for (std::size_t j = 0; j < cands.size(); ++j)
            if (alive[j] && bowen_ball_contains(system, cands[i], cands[j], n, eps)) alive[j] = 0;
    }
    return members;
}

std::vector<long> probe_indices(long count, long start, long step) {
    std::vector<long> out;
    for (long i = 0; i < count; ++i) out.push_back(start + i * step);
    return out;
}

}  // namespace

TEST_CASE("bowen ball membership") {
    const SystemSpec cat = make_system("cat");
    const Point x{0.37, 0.82};
    CHECK(bowen_ball_contains(cat, x, x, 1, 1e-12));
    CHECK(bowen_ball_contains(cat, x, x, 20, 1e-12));

    // Rigid rotation is an isometry: membership reduces to the time-0 distance.
    const SystemSpec rot = make_system("rotation");
    const Point y{0.40, 0.84};
    const double d0 = rot.domain.distance(x, y);
    for (long n : {1L, 5L, 50L}) {
        CHECK(bowen_ball_contains(rot, x, y, n, d0 + 1e-12));
        CHECK_FALSE(bowen_ball_contains(rot, x, y, n, d0 - 1e-12));
    }

    // Cat map: displacement along E^u grows by e^{chi} per step.
    const double eps = 0.05;
    const Vec2 eu = Vec2{1.0, (std::sqrt(5.0) - 1.0) / 2.0}.normalized();
    const Point z = cat.domain.canonicalize(x + eu * (0.9 * eps));
    CHECK(bowen_ball_contains(cat, x, z, 1, eps));
    CHECK_FALSE(bowen_ball_contains(cat, x, z, 2, eps));  // 0.9 eps e^{0.96} > eps

    // Nesting B_{n+1} subset of B_n on random pairs.
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Point a{u(rng), u(rng)};
        const Point b = cat.domain.canonicalize(a + Vec2{0.03 * (u(rng) - 0.5), 0.03 * (u(rng) - 0.5)});
        for (long n : {1L, 2L, 4L})
            if (bowen_ball_contains(cat, a, b, n + 1, 0.02)) CHECK(bowen_ball_contains(cat, a, b, n, 0.02));
    }
}

TEST_CASE("greedy separated set matches the brute-force oracle") {
    const SystemSpec cat = make_system("cat");
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(1, 12);
    std::uniform_int_distribution<long> n_dist(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> cands(static_cast<std::size_t>(size_dist(rng)));
        for (auto& p : cands) p = {u(rng), u(rng)};
        const long n = n_dist(rng);
        const double eps = 0.02 + 0.2 * u(rng);
        const SeparatedSet set = greedy_separated_set(cat, cands, n, eps);
        const std::vector<long> oracle = brute_force_greedy(cat, cands, n, eps);
        REQUIRE(set.indices.size() == oracle.size());
        for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(set.indices[k] == oracle[k]);
    }
}

TEST_CASE("greedy separated set: trivial cases and both invariants") {
    const SystemSpec cat = make_system("cat");

    const SeparatedSet single = greedy_separated_set(cat, std::vector<Point>{{0.2, 0.3}}, 4, 0.1);
    CHECK(single.size() == 1);
    CHECK(single.indices[0] == 0);

    // Pairwise farther than epsilon at time 0: everything is kept.
    std::vector<Point> lattice;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) lattice.push_back({0.2 * i, 0.2 * j});
    CHECK(greedy_separated_set(cat, lattice, 1, 0.1).size() == 25);

    // Orbit-indexed variant agrees with the raw-point variant and satisfies
    // both the separation and the spanning invariant.
    const OrbitSegment orb = sample_orbit(cat, 73, 500, 3000);
    std::vector<long> cands;
    std::vector<Point> cand_points;
    for (long i = 0; i < 2000; i += 3) {
        cands.push_back(i);
        cand_points.push_back(orb.points[static_cast<std::size_t>(i)]);
    }
    const long n = 5;
    const double eps = 0.15;
    const SeparatedSet from_orbit = greedy_separated_set(cat, orb, cands, n, eps);
    const SeparatedSet from_points = greedy_separated_set(cat, cand_points, n, eps);
    REQUIRE(from_orbit.size() == from_points.size());
    for (long k = 0; k < from_orbit.size(); ++k)
        CHECK(from_orbit.indices[k] == cands[static_cast<std::size_t>(from_points.indices[k])]);

    for (long a = 0; a < from_orbit.size(); ++a)
        for (long b = a + 1; b < from_orbit.size(); ++b)
            CHECK_FALSE(bowen_ball_contains(cat, from_orbit.points[static_cast<std::size_t>(a)],
                                            from_orbit.points[static_cast<std::size_t>(b)], n, eps));
    for (const Point& c : cand_points) {
        bool spanned = false;
        for (const Point& m : from_orbit.points)
            if (bowen_ball_contains(cat, m, c, n, eps)) {
                spanned = true;
                break;
            }
        CHECK(spanned);
    }

    // Cardinality monotone: nonincreasing in epsilon, nondecreasing in n.
    long prev = 1L << 40;
    for (double e : {0.05, 0.1, 0.2, 0.4}) {
        const long card = greedy_separated_set(cat, orb, cands, 3, e).size();
        CHECK(card <= prev);
        prev = card;
    }
    prev = 0;
    for (long nn : {1L, 2L, 4L, 8L}) {
        const long card = greedy_separated_set(cat, orb, cands, nn, 0.2).size();
        CHECK(card >= prev);
        prev = card;
    }
}

TEST_CASE("Brin-Katok estimator headlines") {
    const std::vector<long> ns{1, 2, 3, 4, 5};
    const std::vector<double> eps{0.2, 0.1};

    const SystemSpec cat = make_system("cat");
    const OrbitSegment corb = sample_orbit(cat, 74, 1000, 200000);
    const auto cest = brin_katok_entropy(cat, corb, probe_indices(40, 100, 997), ns, eps, 3);
    CHECK(std::abs(cest.headline - kCatChi) < 0.1);
    CHECK(cest.headline_epsilon == doctest::Approx(0.1));
    CHECK(cest.table.size() == ns.size() * eps.size());

    const SystemSpec rot = make_system("rotation");
    const OrbitSegment rorb = sample_orbit(rot, 74, 100, 200000);
    const auto rest = brin_katok_entropy(rot, rorb, probe_indices(40, 100, 997), ns, eps, 3);
    CHECK(std::abs(rest.headline) < 0.05);

    const SystemSpec baker = make_system("baker");
    const OrbitSegment borb = sample_orbit(baker, 74, 1000, 200000);
    const auto best = brin_katok_entropy(baker, borb, probe_indices(40, 100, 997), ns, eps, 3);
    CHECK(std::abs(best.headline - std::log(2.0)) < 0.1);

    CHECK_THROWS_AS(brin_katok_entropy(cat, corb, probe_indices(10, 100, 997), ns, eps, 3),
                    OutOfRangeError);
    // Unresolvably small balls: every estimate is zero.
    const OrbitSegment tiny = sample_orbit(cat, 75, 1000, 300);
    CHECK_THROWS_AS(brin_katok_entropy(cat, tiny, probe_indices(30, 1, 2), ns, {1e-9}, 7),
                    EmptyBallError);
}

TEST_CASE("Gamma_E selection on the cat map") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 76, 1000, 200000);
    const std::vector<long> probes = probe_indices(50, 100, 797);
    const std::vector<long> grid{6, 8};

    const SelectionResult res = select_gamma_e(cat, orb, probes, 0.2, kCatChi, 0.3, 0.4, grid, 3);
    CHECK(res.fraction >= 0.8);
    CHECK(res.threshold_n <= 8);
    for (long m : res.members) CHECK(std::find(probes.begin(), probes.end(), m) != probes.end());

    CHECK_THROWS_AS(select_gamma_e(cat, orb, probes, 0.2, kCatChi, 0.0, 0.4, grid, 3),
                    SelectionFailureError);
}

TEST_CASE("separated-set cardinality bounds") {
    // cardE = e^{n e} exactly.
    const long n = 10;
    const double e = 0.5;
    const long cardE = static_cast<long>(std::llround(std::exp(n * e)));
    auto [lo, hi] = separated_count_bounds(cardE, n, e, 0.1, 0.1);
    CHECK(lo);
    CHECK(hi);

    auto [lo2, hi2] = separated_count_bounds(1, 100, 0.5, 0.1, 0.1);
    CHECK_FALSE(lo2);
    CHECK(hi2);

    CHECK_THROWS_AS(separated_count_bounds(0, 10, 0.5, 0.1, 0.1), OutOfRangeError);
}
