#include <cmath>
#include <random>

#include "doctest.h"
#include "katok/errors.hpp"
#include "katok/horseshoe.hpp"
#include "katok/measures.hpp"

using namespace katok;

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

Observable constant(double c) {
    return {"const", [c](const Point&) { return c; }, std::abs(c)};
}

EmpiricalMeasure random_measure(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    return EmpiricalMeasure::uniform(std::move(pts));
}

HorseshoeDescription synthetic_shift(std::vector<Point> symbols, long m) {
    HorseshoeDescription desc;
    desc.symbol_points = std::move(symbols);
    desc.m = m;
    desc.entropy = std::log(static_cast<double>(desc.symbol_points.size())) / static_cast<double>(m);
    return desc;
}

}  // namespace

TEST_CASE("empirical measures") {
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform({{0.1, 0.2}, {0.3, 0.4}, {0.9, 0.5}});
    mu.validate();
    CHECK(mu.integrate(constant(2.5)) == doctest::Approx(2.5).epsilon(1e-14));

    EmpiricalMeasure bad = mu;
    bad.weights[0] = -bad.weights[0];
    CHECK_THROWS_AS(bad.validate(), OutOfRangeError);
    bad = mu;
    bad.weights[0] *= 2.0;
    CHECK_THROWS_AS(bad.validate(), OutOfRangeError);
}

TEST_CASE("trig basis ordering and values") {
    const TestBasis basis = trig_basis(10);
    REQUIRE(basis.size() == 10);
    const char* names[] = {"1",           "cos2pi(x)",   "sin2pi(x)",   "cos2pi(y)",  "sin2pi(y)",
                           "cos2pi(x+y)", "sin2pi(x+y)", "cos2pi(x-y)", "sin2pi(x-y)", "cos2pi(2x)"};
    for (int i = 0; i < 10; ++i) CHECK(basis.members[i].name == names[i]);
    for (int i = 0; i < 10; ++i) CHECK(basis.members[i].sup_norm == 1.0);

    const Point p{0.13, 0.71};
    CHECK(basis.members[0].eval(p) == 1.0);
    CHECK(basis.members[1].eval(p) == doctest::Approx(std::cos(kTwoPi * p.x)).epsilon(1e-15));
    CHECK(basis.members[4].eval(p) == doctest::Approx(std::sin(kTwoPi * p.y)).epsilon(1e-15));
    CHECK(basis.members[7].eval(p) ==
          doctest::Approx(std::cos(kTwoPi * (p.x - p.y))).epsilon(1e-15));
}

TEST_CASE("chebyshev basis on a box") {
    const Domain box{DomainKind::Box, {-1.0, 0.0}, {3.0, 2.0}};
    const TestBasis basis = chebyshev_basis(box, 6);
    REQUIRE(basis.size() == 6);
    // T0T0 = 1 everywhere; T1 is the rescaled coordinate.
    CHECK(basis.members[0].eval({0.5, 1.3}) == doctest::Approx(1.0));
    CHECK(basis.members[1].eval({1.0, 0.7}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(basis.members[1].eval({3.0, 0.7}) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& psi : basis.members) {
        CHECK(psi.sup_norm <= 1.001 + 1e-9);
        CHECK(psi.sup_norm > 0.9);  // grid sweep close to the true sup 1
    }
}

TEST_CASE("weak* distance is a pseudometric bounded by 1") {
    const TestBasis basis = trig_basis(12);
    std::mt19937_64 rng(91);
    const EmpiricalMeasure mu = random_measure(rng, 7);
    CHECK(weak_star_distance(mu, mu, basis, 12) == 0.0);

    for (int t = 0; t < 100; ++t) {
        const EmpiricalMeasure a = random_measure(rng, 5), b = random_measure(rng, 6),
                               c = random_measure(rng, 4);
        const double dab = weak_star_distance(a, b, basis, 12);
        const double dba = weak_star_distance(b, a, basis, 12);
        const double dac = weak_star_distance(a, c, basis, 12);
        const double dcb = weak_star_distance(c, b, basis, 12);
        CHECK(dab == dba);
        CHECK(dab <= 1.0);
        CHECK(dab <= dac + dcb + 1e-12);
    }
    CHECK(weak_star_tail(8) == doctest::Approx(1.0 / 256.0));
    CHECK_THROWS_AS(weak_star_distance(mu, mu, basis, 0), OutOfRangeError);
    CHECK_THROWS_AS(weak_star_distance(mu, mu, basis, 13), OutOfRangeError);
}

TEST_CASE("weak* distance of two point masses matches direct summation") {
    const TestBasis basis = trig_basis(8);
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform({{0.0, 0.0}});
    const EmpiricalMeasure nu = EmpiricalMeasure::uniform({{0.5, 0.5}});

    // Direct evaluation of the eight test integrals at the two atoms.
    auto at = [&](const Observable& psi, const Point& p) { return psi.eval(p); };
    double oracle = 0.0;
    for (int i = 1; i <= 8; ++i) {
        const Observable& psi = basis.members[i - 1];
        oracle += std::pow(2.0, -i) * 0.5 * std::abs(at(psi, {0.0, 0.0}) - at(psi, {0.5, 0.5}));
    }
    // Nonzero terms: cos2pi(x) and cos2pi(y) differ by 2; x+y and x-y agree.
    CHECK(oracle == doctest::Approx(0.25 * 0.5 * 2.0 + 0.0625 * 0.5 * 2.0).epsilon(1e-14));
    CHECK(weak_star_distance(mu, nu, basis, 8) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("K and r0 selection") {
    const TestBasis basis = trig_basis(40);

    const KAndR0 a = choose_K_r0(0.1, basis);
    CHECK(a.K == 6);
    const KAndR0 b = choose_K_r0(0.5, basis);
    CHECK(b.K == 4);

    for (const KAndR0& sel : {a, b}) {
        const double r = (sel.K == 6) ? 0.1 : 0.5;
        CHECK(std::exp2(-sel.K + 1.0) < r / 2.0);        // defining inequality
        CHECK(std::exp2(-sel.K + 2.0) >= r / 2.0);       // minimality
        CHECK(sel.r0 > 0.0);
        CHECK(sel.r0 < r);
        CHECK(sel.r0 * (1.0 - std::exp2(-static_cast<double>(sel.K))) * 0.5 < r / 2.0);
    }

    // Density check: cos2pi(3x) is not within 0.5 of the first four members,
    // so K grows until the family member itself enters the window.
    const KAndR0 c = choose_K_r0(0.5, basis, {basis.members[21]});
    CHECK(c.K >= 22);
    CHECK_THROWS_AS(choose_K_r0(0.5, trig_basis(5), {basis.members[21]}), OutOfRangeError);
    CHECK_THROWS_AS(choose_K_r0(1.0, basis), OutOfRangeError);
}

TEST_CASE("modulus of continuity") {
    const Domain torus{DomainKind::Torus, {0, 0}, {1, 1}};
    std::vector<std::pair<Point, Point>> pairs;
    std::mt19937_64 rng(92);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Point x{u(rng), u(rng)};
        pairs.push_back({x, torus.canonicalize(x + Vec2{0.01 * (u(rng) - 0.5), 0.01 * (u(rng) - 0.5)})});
    }
    CHECK(modulus_of_continuity(torus, constant(3.0), 0.01, pairs) == 0.0);

    const Observable cosx = trig_basis(2).members[1];
    const double mod = modulus_of_continuity(torus, cosx, 0.01, pairs);
    CHECK(mod > 0.0);
    CHECK(mod <= kTwoPi * 0.01);

    // Pairs farther than eps0 are ignored.
    CHECK(modulus_of_continuity(torus, cosx, 0.01, {{{0.0, 0.0}, {0.3, 0.0}}}) == 0.0);
}

TEST_CASE("variational pressure on shift models") {
    const SystemSpec cat = make_system("cat");
    const HorseshoeDescription desc = synthetic_shift({{0.1, 0.2}, {0.6, 0.7}, {0.3, 0.9}}, 2);

    const PressureEstimate zero = pressure_variational(cat, desc, constant(0.0));
    CHECK(zero.value == doctest::Approx(std::log(3.0) / 2.0).epsilon(1e-14));
    CHECK(zero.method == "variational");
    CHECK(zero.support == 3);

    const PressureEstimate shifted = pressure_variational(cat, desc, constant(0.37));
    CHECK(shifted.value == doctest::Approx(std::log(3.0) / 2.0 + 0.37).epsilon(1e-12));

    // Additivity under constants and the convexity bounds for a nonconstant
    // potential, with cylinder values recomputed by hand.
    const Observable cosx = trig_basis(2).members[1];
    const Observable cosx_plus = {"cosx+c", [&](const Point& p) { return cosx.eval(p) + 0.9; }, 1.9};
    const double p1 = pressure_variational(cat, desc, cosx).value;
    const double p2 = pressure_variational(cat, desc, cosx_plus).value;
    CHECK(p2 - p1 == doctest::Approx(0.9).epsilon(1e-12));

    double cmin = 1e300, cmax = -1e300;
    for (const Point& x : desc.symbol_points) {
        const Point fx = cat.domain.canonicalize(cat.forward(x));
        const double cyl = (cosx.eval(x) + cosx.eval(fx)) / 2.0;
        cmin = std::min(cmin, cyl);
        cmax = std::max(cmax, cyl);
    }
    CHECK(p1 >= std::log(3.0) / 2.0 + cmin - 1e-12);
    CHECK(p1 <= std::log(3.0) / 2.0 + cmax + 1e-12);

    CHECK_THROWS_AS(pressure_variational(cat, synthetic_shift({{0.1, 0.1}}, 1), constant(0.0)),
                    OutOfRangeError);
}

TEST_CASE("two-symbol pressure matches the Bernoulli supremum") {
    const SystemSpec cat = make_system("cat");
    const Point pa{0.1, 0.1}, pb{0.8, 0.8};
    const double a = 0.4, b = -0.7;
    const Observable phi = {"cylinder",
                            [&](const Point& p) {
                                return (cat.domain.distance(p, pa) < cat.domain.distance(p, pb)) ? a
                                                                                                 : b;
                            },
                            0.7};
    const double P = pressure_variational(cat, synthetic_shift({pa, pb}, 1), phi).value;
    CHECK(P == doctest::Approx(std::log(std::exp(a) + std::exp(b))).epsilon(1e-14));

    double sup = -1e300;
    for (int k = 1; k < 10000; ++k) {
        const double p = k / 10000.0;
        sup = std::max(sup, -p * std::log(p) - (1 - p) * std::log(1 - p) + p * a + (1 - p) * b);
    }
    CHECK(std::abs(P - sup) < 1e-6);
}

TEST_CASE("partition-function pressure") {
    const SystemSpec cat = make_system("cat");
    const OrbitSegment orb = sample_orbit(cat, 93, 500, 4000);

    // phi = 0: exactly (1/n) log card of the greedy set.
    const PressureEstimate zero = pressure_partition_function(cat, orb.points, constant(0.0), 3, 0.2);
    CHECK(zero.value ==
          doctest::Approx(std::log(static_cast<double>(zero.support)) / 3.0).epsilon(1e-14));
    CHECK(zero.method == "partition-function");

    // Single candidate: S_n phi / n.
    const Observable cosx = trig_basis(2).members[1];
    Point x{0.3, 0.4};
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        s += cosx.eval(x);
        x = cat.domain.canonicalize(cat.forward(x));
    }
    const PressureEstimate single =
        pressure_partition_function(cat, {{0.3, 0.4}}, cosx, 4, 0.1);
    CHECK(single.value == doctest::Approx(s / 4.0).epsilon(1e-14));
    CHECK(single.support == 1);

    CHECK_THROWS_AS(pressure_partition_function(cat, {}, cosx, 4, 0.1), OutOfRangeError);

    // Full 2-shift realized by the baker map: the growth rate of the
    // partition function between two depths converges to log 2.
    const SystemSpec baker = make_system("baker");
    const OrbitSegment borb = sample_orbit(baker, 93, 100, 20000);
    const PressureEstimate p3 = pressure_partition_function(baker, borb.points, constant(0.0), 3, 0.3);
    const PressureEstimate p9 = pressure_partition_function(baker, borb.points, constant(0.0), 9, 0.3);
    const double slope = (9.0 * p9.value - 3.0 * p3.value) / 6.0;
    CHECK(std::abs(slope - std::log(2.0)) < 0.05);
}

TEST_CASE("item v verification windows") {
    const SystemSpec cat = make_system("cat");
    // Entropy exactly e = log(2)/2; phi constant, mu arbitrary.
    const HorseshoeDescription desc = synthetic_shift({{0.2, 0.3}, {0.7, 0.6}}, 2);
    const double e = std::log(2.0) / 2.0;
    const EmpiricalMeasure mu = EmpiricalMeasure::uniform({{0.4, 0.4}});

    const ItemVResult exact = verify_item_v(cat, desc, constant(0.25), mu, e, 0.1);
    CHECK(exact.strong);
    CHECK(exact.proof_window);
    CHECK(std::abs(exact.pressure - (e + 0.25)) < 1e-12);
    CHECK(exact.integral == doctest::Approx(0.25));

    // phi = 0 reduces to the item-iv style window around e.
    const ItemVResult ziv = verify_item_v(cat, desc, constant(0.0), mu, e, 0.1);
    CHECK(ziv.proof_window);
    CHECK(ziv.margin_low == doctest::Approx(0.1 * (7.0 + e)).epsilon(1e-9));
    CHECK(ziv.margin_high == doctest::Approx(0.4).epsilon(1e-9));

    // Wildly wrong e: both verdicts fail.
    const ItemVResult off = verify_item_v(cat, desc, constant(0.0), mu, 2.0, 0.1);
    CHECK_FALSE(off.strong);
    CHECK_FALSE(off.proof_window);
}
