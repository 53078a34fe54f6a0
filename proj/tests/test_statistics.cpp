#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "katok/errors.hpp"
#include "katok/statistics.hpp"

using namespace katok;

namespace {

const double kCatChi = std::log((3.0 + std::sqrt(5.0)) / 2.0);

Observable constant_obs(double c) {
    return {"const", [c](const Point&) { return c; }, std::abs(c)};
}

Observable coord_x() {
    return {"x", [](const Point& p) { return p.x; }, 1.0};
}

bool is_subset(const std::vector<long>& a, const std::vector<long>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("birkhoff sums: constants, single step, additivity, cat potential") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 61, 1000, 11000);

    CHECK(birkhoff_sum(orb, constant_obs(0.7), 10, 25) == doctest::Approx(0.7 * 25).epsilon(1e-12));
    CHECK(birkhoff_sum(orb, coord_x(), 42, 1) == doctest::Approx(orb.points[42].x));
    CHECK_THROWS_AS(birkhoff_sum(orb, coord_x(), 10900, 200), OutOfRangeError);

    // Cocycle additivity S_{n+m}(x) = S_n(x) + S_m(f^n x).
    const Observable phi = coord_x();
    for (long i : {0L, 17L, 512L})
        for (long n : {1L, 13L, 100L})
            CHECK(birkhoff_sum(orb, phi, i, n + 57) ==
                  doctest::Approx(birkhoff_sum(orb, phi, i, n) + birkhoff_sum(orb, phi, i + n, 57))
                      .epsilon(1e-12));

    // -phi^u on the cat map is constantly chi.
    const Vec2 eu = Vec2{1.0, (std::sqrt(5.0) - 1.0) / 2.0}.normalized();
    const Observable minus_phi_u{
        "minus_phi_u",
        [&cat, eu](const Point& p) { return std::log((cat.derivative(p) * eu).norm()); }, 1.0};
    CHECK(birkhoff_sum(orb, minus_phi_u, 0, 10000) ==
          doctest::Approx(10000.0 * kCatChi).epsilon(1e-6));
}

TEST_CASE("Gamma_J selection") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 62, 1000, 8000);
    const SplittingField field = compute_splitting_field(cat, orb);
    const std::vector<long> grid = default_n_grid();

    const SelectionResult res = select_gamma_j(field, kCatChi, 0.1, 0.05, grid);
    CHECK(res.threshold_n == 50);
    CHECK(res.fraction == doctest::Approx(1.0));

    const SystemSpec pcat = make_system("pcat", {{"kappa", 0.02}});
    const OrbitSegment porb = sample_orbit(pcat, 62, 1000, 8000);
    const SplittingField pfield = compute_splitting_field(pcat, porb);
    const LyapunovSpectrum pspec = lyapunov_spectrum_qr(pcat, porb);

    CHECK_THROWS_AS(select_gamma_j(pfield, pspec.chi_plus_sum, 0.1, 0.0, grid),
                    SelectionFailureError);
    const SelectionResult pres = select_gamma_j(pfield, pspec.chi_plus_sum, 0.1, 0.05, grid);
    CHECK(pres.threshold_n <= 1000);
    CHECK(pres.fraction >= 0.9);
    // Every member satisfies the defining inequality at all tested n >= n_J.
    for (std::size_t k = 0; k < pres.members.size(); k += 97)
        for (long n : grid)
            if (n >= pres.threshold_n)
                CHECK(std::abs(pfield.psi(pres.members[k], n) - pspec.chi_plus_sum) <= 0.05);
}

TEST_CASE("Gamma_B selection") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 63, 1000, 20000);
    const std::vector<long> grid = default_n_grid();

    const SelectionResult all = select_gamma_b(orb, constant_obs(3.0), 0.1, 0.05, grid);
    CHECK(all.threshold_n == 50);
    CHECK(all.fraction == doctest::Approx(1.0));

    const SelectionResult res = select_gamma_b(orb, coord_x(), 0.1, 0.05, grid);
    CHECK(res.threshold_n <= 1000);
    CHECK(res.fraction >= 0.9);

    // delta = 0 demands every index pass; at r = 0.001 the empirical
    // fluctuations at n = 2000 are an order of magnitude larger.
    CHECK_THROWS_AS(select_gamma_b(orb, coord_x(), 0.0, 0.001, grid), SelectionFailureError);

    // Monotonicity in r at a fixed grid value: larger r never shrinks the set.
    const SelectionResult tight = select_gamma_b(orb, coord_x(), 0.5, 0.03, {200});
    const SelectionResult loose = select_gamma_b(orb, coord_x(), 0.5, 0.06, {200});
    CHECK(tight.members.size() <= loose.members.size());
    CHECK(is_subset(tight.members, loose.members));
}

TEST_CASE("grid partition") {
    Domain torus{DomainKind::Torus, {0, 0}, {1, 1}};
    const Partition part = grid_partition(torus, 0.2);
    CHECK(part.side == doctest::Approx(0.2 / (2.0 * std::sqrt(2.0))));
    const long per_axis = static_cast<long>(std::ceil(1.0 / part.side));
    CHECK(part.nx == per_axis);
    CHECK(part.cell_count() == per_axis * per_axis);
    CHECK(part.cell_diameter() <= 0.1 + 1e-12);

    // locate is constant on cells and consistent with membership.
    const Point p{0.33, 0.71};
    const long id = part.locate(p);
    CHECK(part.locate({p.x + 0.2 * part.side, p.y}) == id);
    CHECK(part.locate({p.x + 1.2 * part.side, p.y}) != id);
    CHECK(part.locate({p.x, p.y + 1.2 * part.side}) != id);
    for (double dx : {0.0, 0.9 * part.side}) {
        const long q = part.locate({0.5 + dx, 0.5});
        CHECK(std::abs(q - part.locate({0.5, 0.5})) <= part.ny);
    }

    CHECK_THROWS_AS(grid_partition(torus, 1e-4), TooFineError);
    CHECK_THROWS_AS(grid_partition(torus, 0.0), OutOfRangeError);
}

TEST_CASE("recurrence constant") {
    CHECK(recurrence_constant({0.3, 0.7}, 0.1) == doctest::Approx(0.075));
    CHECK(recurrence_constant({0.5, 0.5}, 0.05) == doctest::Approx(0.05));
    std::vector<double> uniform(100, 0.01);
    CHECK(recurrence_constant(uniform, 0.1) == doctest::Approx(0.0025));
    CHECK(recurrence_constant({0.5, 0.0, 0.5}, 0.01) == doctest::Approx(0.01));
    CHECK_THROWS_AS(recurrence_constant({0.4, 0.4}, 0.1), OutOfRangeError);
}

TEST_CASE("Gamma_R selection") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 64, 1000, 50000);
    const std::vector<long> grid = default_n_grid();

    // Single cell + F = everything: every index qualifies immediately.
    const Partition coarse = grid_partition(cat.domain, 10.0);
    REQUIRE(coarse.cell_count() == 1);
    std::vector<long> all(orb.length());
    for (long i = 0; i < orb.length(); ++i) all[static_cast<std::size_t>(i)] = i;
    const SelectionResult easy = select_gamma_r(orb, coarse, all, 0.1, 0.2, grid);
    CHECK(easy.threshold_n == 50);
    CHECK(easy.fraction == doctest::Approx(1.0));

    // Real partition with a full target set. The cells have mass ~1/225, so
    // the expected number of window returns is 0.2*n/225: n_R lands in the
    // thousands, and the grid must extend beyond the default.
    const Partition part = grid_partition(cat.domain, 0.2);
    const std::vector<long> wide_grid = {500, 1000, 2000, 5000, 10000};
    const SelectionResult res = select_gamma_r(orb, part, all, 0.1, 0.2, wide_grid);
    CHECK(res.threshold_n <= 10000);
    CHECK(res.fraction >= 0.9);
    // Counting bound: each member has a return in {n,...,floor(n+rn)} for all
    // tested n >= n_R.
    for (std::size_t k = 0; k < res.members.size(); k += 211) {
        const long i = res.members[k];
        const long ci = part.locate(orb.points[static_cast<std::size_t>(i)]);
        for (long n : wide_grid) {
            if (n < res.threshold_n) continue;
            long hits = 0;
            for (long kk = n; kk <= n + static_cast<long>(std::floor(0.2 * n)); ++kk)
                if (part.locate(orb.points[static_cast<std::size_t>(i + kk)]) == ci) ++hits;
            CHECK(hits >= 1);
        }
    }

    CHECK_THROWS_AS(select_gamma_r(orb, part, {}, 0.1, 0.2, grid), SelectionFailureError);
}
