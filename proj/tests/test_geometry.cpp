#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horolab/geometry.hpp"
#include "horolab/rng.hpp"

using namespace hl;

static const double kModular = 2.0 * std::acosh(1.5);

TEST_CASE("slope normalization") {
    CHECK(Slope(2, 4) == Slope(1, 2));
    CHECK(Slope(-2, 4) == Slope(-1, 2));
    CHECK(Slope(3, -6) == Slope(-1, 2)); // q is kept positive
    CHECK(Slope(5, 0) == Slope(1, 0));
    CHECK(slope_gcd(12, 18) == 6);
}

TEST_CASE("modular point has the (3,3,3) Markov triple") {
    FNPoint X = FNPoint::s11(kModular, 0.0);
    Holonomy h = build_holonomy(X);
    CHECK(h.traces.x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(h.traces.y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(h.traces.z == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::fabs(h.residual) < 1e-9);
    for (Slope c : {Slope(0, 1), Slope(1, 0), Slope(1, 1)})
        CHECK(curve_length(X, c) == doctest::Approx(kModular).epsilon(1e-12));
}

TEST_CASE("trace recursion equals matrix words") {
    CounterRng rng(7, 1);
    for (int i = 0; i < 20; ++i) {
        FNPoint X = FNPoint::s11(rng.uniform(i, 0, 0.5, 3.0), rng.uniform(i, 1, -2.0, 2.0));
        Holonomy h = build_holonomy(X);
        TraceEngine E = make_engine(X);
        for (long long q = 1; q <= 8; ++q)
            for (long long p = -8; p <= 8; ++p) {
                if (slope_gcd(p < 0 ? -p : p, q) != 1) continue;
                Slope c(p, q);
                Mat2 M = word_matrix(c, h.A, h.B);
                double tr = M[0][0] + M[1][1];
                LogTrace t = slope_trace(E, c);
                CHECK(std::fabs(std::fabs(tr) - t.abs_value()) <
                      1e-9 * std::max(1.0, std::fabs(tr)));
            }
    }
}

TEST_CASE("cusp relation holds off the modular point") {
    CounterRng rng(11, 2);
    for (int i = 0; i < 200; ++i) {
        FNPoint X = FNPoint::s11(rng.uniform(i, 0, 0.2, 5.0), rng.uniform(i, 1, -6.0, 6.0));
        CHECK(std::fabs(build_holonomy(X).residual) < 1e-9);
    }
}

TEST_CASE("s04 lengths are exactly twice the half-coordinate torus lengths") {
    FNPoint T = FNPoint::s11(1.3, 0.6);
    FNPoint Q = FNPoint::s04(2.6, 1.2);
    for (Slope c : {Slope(0, 1), Slope(1, 0), Slope(1, 1), Slope(3, 2)})
        CHECK(curve_length(Q, c) == doctest::Approx(2.0 * curve_length(T, c)).epsilon(1e-12));
}

TEST_CASE("twist preserves the twisted curve and moves its dual") {
    FNPoint X = FNPoint::s11(1.7, 0.4);
    FNPoint Y = twist(X, 0, 0.35);
    CHECK(curve_length(Y, Slope(0, 1)) == curve_length(X, Slope(0, 1)));
    CHECK(curve_length(Y, Slope(1, 0)) != curve_length(X, Slope(1, 0)));
    // full twist is the Dehn twist: the spectrum shears by (p,q) -> (p, q+p)
    FNPoint Z = twist(X, 0, X.lengths[0]);
    CHECK(curve_length(Z, Slope(1, 0)) ==
          doctest::Approx(curve_length(X, Slope(1, 1))).epsilon(1e-12));
    CHECK(curve_length(Z, Slope(-1, 1)) ==
          doctest::Approx(curve_length(X, Slope(1, 0))).epsilon(1e-12));
}

TEST_CASE("earthquake semigroup property") {
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});
    FNPoint X = FNPoint::s11(2.1, 0.8);
    std::vector<Slope> gamma{Slope(0, 1)};
    FNPoint A = earthquake_unit(earthquake_unit(X, cfg, gamma, 0.3), cfg, gamma, 0.5);
    FNPoint B = earthquake_unit(X, cfg, gamma, 0.8);
    CHECK(A.lengths[0] == doctest::Approx(B.lengths[0]).epsilon(1e-12));
    CHECK(A.twists[0] == doctest::Approx(B.twists[0]).epsilon(1e-12));
}

TEST_CASE("moduli_reduce: canonical representative") {
    FNPoint X = FNPoint::s11(1.2, 7.9);
    FNPoint R = moduli_reduce(X);
    CHECK(systole(R).slope == Slope(0, 1));
    CHECK(R.twists[0] >= 0.0);
    CHECK(R.twists[0] < R.lengths[0]);
    // idempotent
    FNPoint R2 = moduli_reduce(R);
    CHECK(R2.lengths[0] == doctest::Approx(R.lengths[0]).epsilon(1e-14));
    CHECK(R2.twists[0] == doctest::Approx(R.twists[0]).epsilon(1e-12));
    // the reduced FN length is the systole of the original marked surface
    CHECK(R.lengths[0] == doctest::Approx(systole(X).length).epsilon(1e-10));
}

TEST_CASE("deep reductions against the high-precision oracle") {
    // reference values computed with 700-digit interval arithmetic
    FNPoint A = moduli_reduce(FNPoint::s11(98.383312616713253, -62.479202736060349));
    CHECK(A.lengths[0] == doctest::Approx(1.1494023436).epsilon(1e-9));
    CHECK(systole(FNPoint::s11(98.383312616713253, -62.479202736060349)).slope ==
          Slope(37, 42));
    FNPoint B = moduli_reduce(FNPoint::s11(5.6735859329983819, -25.263271030177708));
    CHECK(B.lengths[0] == doctest::Approx(0.35661653904145424).epsilon(1e-12));
    CHECK(systole(FNPoint::s11(5.6735859329983819, -25.263271030177708)).slope ==
          Slope(1, 5));
}

TEST_CASE("slope_length_stable handles near-parabolic traces") {
    FNPoint X = FNPoint::s11(1e-4, 0.3e-4);
    TraceEngine E = make_engine(X);
    CHECK(slope_length_stable(X, E, Slope(0, 1)) == X.lengths[0]);
    double l10 = slope_length_stable(X, E, Slope(1, 0));
    CHECK(l10 > 0.0);
    CHECK(std::isfinite(l10));
    // agreement with the plain path where the trace is resolvable
    FNPoint Y = FNPoint::s11(1.5, 0.7);
    TraceEngine EY = make_engine(Y);
    CHECK(slope_length_stable(Y, EY, Slope(3, 2)) ==
          doctest::Approx(curve_length(Y, Slope(3, 2))).epsilon(1e-12));
}

TEST_CASE("thurston distance bounds and thick part") {
    FNPoint X = FNPoint::s11(1.9, 0.2);
    auto [lo, hi] = thurston_dist_bound(X, X, 10);
    CHECK(lo <= 1e-12);
    CHECK(hi < 1e-9);
    FNPoint Y = FNPoint::s11(2.4, 0.2);
    auto [lo2, hi2] = thurston_dist_bound(X, Y, 10);
    CHECK(lo2 > 0.0);
    CHECK(lo2 <= hi2);
    CHECK(in_thick_part(X, 0.5));
    CHECK_FALSE(in_thick_part(FNPoint::s11(0.05, 0.0), 0.5));
}

TEST_CASE("fd cap marks the edge of the systole cell") {
    double cap = fd_length_cap(0.0);
    CHECK(cap == doctest::Approx(kModular).epsilon(1e-8));
    CHECK(systole(FNPoint::s11(cap - 1e-6, 0.0)).slope == Slope(0, 1));
    CHECK(fd_length_cap(2.0) > cap); // boundary thickens the cell
}
