#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ecomason/params.hpp"

using namespace ecomason;
using Catch::Approx;

TEST_CASE("default parameters", "[params]") {
    BuildingParams p;
    CHECK(p.seismic_coefficient() == Approx(0.352));
    CHECK(p.big_m_wall() == Approx(2.5));
    CHECK(p.tau_allw == Approx(0.5e6));
    CHECK(p.B_fo == Approx(0.8));
    CHECK(p.n_slc_min == 2);
    CHECK(p.n_slc_max == 20);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("seismic coefficient follows its factors", "[params]") {
    BuildingParams p = apply_overrides(BuildingParams{}, {{"Z", 2.0}, {"K", 1.0}});
    CHECK(p.seismic_coefficient() == Approx(0.08 * 2.0 * 1.0 * 1.0));
}

TEST_CASE("overrides convert stress units and reject bad input", "[params]") {
    BuildingParams p = apply_overrides(BuildingParams{}, {{"tau_allw", 0.7}, {"B_fo", 0.81}, {"n_rm", 4}});
    CHECK(p.tau_allw == Approx(0.7e6));
    CHECK(p.B_fo == Approx(0.81));
    CHECK(p.n_rm == 4);
    CHECK(to_key_values(p).at("tau_allw") == Approx(0.7));

    CHECK_THROWS_AS(apply_overrides(BuildingParams{}, {{"nonsense", 1.0}}), ParamError);
    CHECK_THROWS_AS(apply_overrides(BuildingParams{}, {{"n_rm", 2.5}}), ParamError);
    CHECK_THROWS_AS(apply_overrides(BuildingParams{}, {{"l_fl_min", 5.0}}), ParamError);
    CHECK_THROWS_AS(apply_overrides(BuildingParams{}, {{"g", -9.8}}), ParamError);
}

TEST_CASE("override documents", "[params]") {
    std::istringstream in("# site\nB_fo = 0.9\n\nZ=1.5  # zone\n");
    const auto kv = parse_override_document(in);
    REQUIRE(kv.size() == 2);
    CHECK(kv.at("B_fo") == Approx(0.9));
    CHECK(kv.at("Z") == Approx(1.5));

    BuildingParams round = apply_overrides(BuildingParams{}, to_key_values(BuildingParams{}));
    CHECK(round == BuildingParams{});
}
