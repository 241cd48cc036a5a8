#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "horolab/topology.hpp"

using namespace hl;

TEST_CASE("surface signature invariants") {
    SurfaceSig s11{1, 1, 0};
    CHECK(s11.euler() == -1);
    CHECK(s11.complexity() == 1);
    CHECK(s11.dim() == 2);
    CHECK(s11.valid());

    SurfaceSig s04{0, 4, 0};
    CHECK(s04.euler() == -2);
    CHECK(s04.complexity() == 1);
    CHECK(s04.dim() == 2);

    CHECK_FALSE(SurfaceSig{0, 2, 0}.valid()); // euler 0
    CHECK_FALSE(SurfaceSig{0, 0, 0}.valid());
    CHECK(SurfaceSig{2, 0, 0}.complexity() == 3);
}

TEST_CASE("configuration table entries") {
    const ConfigTable& tab = ConfigTable::instance();
    CHECK(tab.has("s11_nonsep"));
    CHECK(tab.has("s04_sep"));
    CHECK_FALSE(tab.has("no_such_key"));
    CHECK_THROWS_AS(tab.cut("no_such_key"), Error);

    const CutData& c11 = tab.cut("s11_nonsep");
    REQUIRE(c11.pieces.size() == 1);
    CHECK(c11.pieces[0] == SurfaceSig{0, 1, 2});
    CHECK(c11.boundary_map == std::vector<std::vector<int>>{{0, 0}});
    CHECK(c11.rho == 0);
    CHECK(recompute_rho(c11) == c11.rho);

    const CutData& c04 = tab.cut("s04_sep");
    REQUIRE(c04.pieces.size() == 2);
    CHECK(c04.pieces[0] == SurfaceSig{0, 2, 1});
    CHECK(c04.pieces[1] == SurfaceSig{0, 2, 1});
    CHECK(recompute_rho(c04) == 0);
}

TEST_CASE("symmetry constants frozen by the oracle") {
    const ConfigTable& tab = ConfigTable::instance();
    for (const char* key : {"s11_nonsep", "s04_sep"}) {
        auto [sigma, stab] = tab.symmetry_constants(key);
        CHECK(sigma == Rational(1));
        CHECK(stab == 2);
    }
}

TEST_CASE("make_config defaults and weight override") {
    const ConfigTable& tab = ConfigTable::instance();
    MultiCurveConfig cfg = tab.make_config("s11_nonsep", {});
    CHECK(cfg.k == 1);
    CHECK(cfg.base == SurfaceSig{1, 1, 0});
    REQUIRE(cfg.weights.size() == 1);
    CHECK(cfg.weights[0] == Rational(1));

    MultiCurveConfig w = tab.make_config("s11_nonsep", {Rational(3, 2)});
    CHECK(w.weights[0] == Rational(3, 2));
}

TEST_CASE("rho recomputation counts components touching one-holed tori") {
    CutData cd;
    cd.pieces = {SurfaceSig{1, 0, 1}, SurfaceSig{0, 1, 2}};
    cd.boundary_map = {{0}, {0, 1}};
    CHECK(recompute_rho(cd) == 1); // component 0 touches the (1,0,1) piece
    cd.boundary_map = {{1}, {0, 0}};
    CHECK(recompute_rho(cd) == 1);
}
