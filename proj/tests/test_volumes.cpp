#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horolab/topology.hpp"
#include "horolab/volumes.hpp"

using namespace hl;

TEST_CASE("graded polynomial arithmetic") {
    GradedPoly p(1);
    p.add_term({2}, 0, Rational(1, 48)); // l^2/48
    p.add_term({0}, 1, Rational(1, 12)); // pi^2/12
    CHECK(p.total_degree() == 2);
    CHECK(poly_eval(p, {2.0}) ==
          doctest::Approx(4.0 / 48.0 + PI * PI / 12.0).epsilon(1e-15));

    GradedPoly q = GradedPoly::constant(1, Rational(2));
    GradedPoly r = poly_mul(p, q);
    CHECK(poly_eval(r, {2.0}) == doctest::Approx(2.0 * poly_eval(p, {2.0})).epsilon(1e-15));
    CHECK(poly_mul(p, GradedPoly(1)).is_zero());

    GradedPoly s = p.scaled(Rational(3));
    CHECK(poly_eval(s, {1.5}) == doctest::Approx(3.0 * poly_eval(p, {1.5})).epsilon(1e-15));
}

TEST_CASE("embedding and length rescaling") {
    GradedPoly p(1);
    p.add_term({3}, 0, Rational(1));
    GradedPoly e = poly_embed(p, 2, {1}); // variable 0 -> variable 1
    CHECK(poly_eval(e, {99.0, 2.0}) == doctest::Approx(8.0));
}

TEST_CASE("volume table entries") {
    const VolumeTable& t = VolumeTable::instance();
    CHECK(t.has(0, 3, 0));
    CHECK(t.has(1, 0, 1));
    CHECK_FALSE(t.has(3, 1, 0));
    CHECK_THROWS_AS(t.entry(3, 1, 0), MissingTableEntry);

    // pants normalization: volume 1, no length dependence
    CHECK(poly_eval(t.entry(0, 1, 2), {7.0, 3.0}) == 1.0);
    // one-holed torus: (l^2 + 4 pi^2)/48, pinned by the Monte Carlo oracle
    const GradedPoly& v101 = t.entry(1, 0, 1);
    for (double l : {0.0, 2.0, 4.0})
        CHECK(poly_eval(v101, {l}) ==
              doctest::Approx((l * l + 4.0 * PI * PI) / 48.0).epsilon(1e-15));
    // cusped torus: pi^2/12 (half-cell moduli volume)
    CHECK(poly_eval(t.entry(1, 1, 0), {}) == doctest::Approx(PI * PI / 12.0).epsilon(1e-15));
}

TEST_CASE("assembled multicurve volume polynomials") {
    const ConfigTable& tab = ConfigTable::instance();
    // nonseparating curve on S_{1,1}: pants piece, prefactor 1/2 => V = l/2
    GradedPoly v11 = assemble_V(tab.make_config("s11_nonsep", {}));
    CHECK(poly_eval(v11, {3.0}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(v11.total_degree() == 1);
    // separating curve on S_{0,4}: two pants pieces, same prefactor
    GradedPoly v04 = assemble_V(tab.make_config("s04_sep", {}));
    CHECK(poly_eval(v04, {3.0}) == doctest::Approx(1.5).epsilon(1e-15));

    GradedPoly w = leading_W(v11);
    CHECK(poly_eval(w, {3.0}) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("weight functions") {
    WeightFunction box = WeightFunction::box_indicator({1.0});
    CHECK(box({0.5}) == 1.0);
    CHECK(box({1.5}) == 0.0);

    WeightFunction::Piece1D tri;
    tri.knots = {0.0, 1.0, 2.0};
    tri.coeffs = {{0.0, 1.0}, {2.0, -1.0}}; // hat function
    WeightFunction pw = WeightFunction::product_piecewise({tri});
    CHECK(pw({0.5}) == doctest::Approx(0.5));
    CHECK(pw({1.5}) == doctest::Approx(0.5));
    CHECK(pw({2.5}) == 0.0);
}

TEST_CASE("horoball mass closed form") {
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});
    WeightFunction f = WeightFunction::box_indicator({1.0});
    // m = int_0^1 (L x / 2) L dx = L^2 / 4
    for (double L : {5.0, 10.0, 20.0})
        CHECK(horoball_mass(cfg, f, L) == doctest::Approx(L * L / 4.0).epsilon(1e-12));
    CHECK(asymptotic_mass_limit(cfg, f) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("horosphere mass and the scaling identity") {
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});
    WeightFunction f = WeightFunction::box_indicator({2.0});
    std::vector<double> a{1.0};
    // k = 1: the simplex {a x = 1} is the point x = 1/a
    CHECK(horosphere_mass(cfg, a, f, 10.0) == doctest::Approx(5.0).epsilon(1e-12));
    std::vector<double> a2{2.0};
    // f(1/2) = 1, V(L/2) = L/4, contraction weight 1/2
    CHECK(horosphere_mass(cfg, a2, f, 10.0) == doctest::Approx(10.0 / 8.0).epsilon(1e-12));

    // physical-coordinate version: mass(a/L, 1) = L * mass(a, L)
    double L = 7.0;
    std::vector<double> aL{a[0] / L};
    CHECK(horosphere_mass_physical(cfg, aL, f, 1.0) ==
          doctest::Approx(L * horosphere_mass_physical(cfg, a, f, L)).epsilon(1e-12));
}
