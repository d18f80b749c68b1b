#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "fixtures.hpp"

using namespace ecomason;
using Catch::Approx;

namespace {

ContinuousPoint br2_example_point() { return {0.23, 2.7, 3.2, 3.2, 0.25, 1.1, 0.7}; }

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("derived state matches hand-computed values", "[model]") {
    BuildingParams p;
    const auto a = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7);
    const auto s = derive_state(p, a, br2_example_point());
    CHECK(s.l_x_wa == Approx(3.66));
    CHECK(s.A_wa_x == Approx(0.8418));
    CHECK(s.S_x == Approx(0.5135).margin(5e-5));
    CHECK(s.v_wa == Approx(7.901).margin(5e-4));
    CHECK(s.v_slc == Approx(0.11824).margin(5e-6));
    CHECK_FALSE(s.inconsistent);
}

TEST_CASE("zero wall thickness annihilates wall terms", "[model]") {
    BuildingParams p;
    const auto a = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7);
    auto x = br2_example_point();
    x.t_wa = 0.0;
    const auto s = derive_state(p, a, x);
    CHECK(s.v_wa == 0.0);
    CHECK(s.A_wa_x == 0.0);
    CHECK(s.S_x == 0.0);
}

TEST_CASE("openings larger than the wall face flag the state", "[model]") {
    BuildingParams p;
    const auto a = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7);
    auto x = br2_example_point();
    x.w_do = 40.0;
    const auto s = derive_state(p, a, x);
    CHECK(s.inconsistent);
    CHECK(s.v_wa < 0.0);
}

TEST_CASE("cost and embodied energy single-term examples", "[model]") {
    BuildingParams p;
    const auto a = fixtures::assignment("So2", "Br2", "Wo", "Pl", 7);
    DerivedState s;
    CHECK(cost(p, a, s) == 0.0);
    CHECK(embodied_energy(p, a, s) == 0.0);

    s.v_wa_tot = 10.0;
    CHECK(cost(p, a, s) == Approx(1450.0));
    CHECK(embodied_energy(p, a, s) == Approx(8911.0));

    DerivedState rebar;
    rebar.l_re_tot = 10.0;
    CHECK(cost(p, a, rebar) == Approx(173.0));
    CHECK(embodied_energy(p, a, rebar) == Approx(337.8).margin(0.1));
}

TEST_CASE("feasibility tolerance is closed and relative", "[model]") {
    const double tol = 1e-6;
    ResidualVector ok{{{"a", ConstraintGroup::Roof, -1.0, 1.0}, {"b", ConstraintGroup::Roof, -1.0, 50.0}}};
    CHECK(is_feasible(ok, tol));
    ResidualVector over{{{"a", ConstraintGroup::Roof, 10.0 * tol * 50.0, 50.0}}};
    CHECK_FALSE(is_feasible(over, tol));
    ResidualVector edge{{{"a", ConstraintGroup::Roof, tol * 50.0, 50.0}}};
    CHECK(is_feasible(edge, tol));
    ResidualVector nan{{{"a", ConstraintGroup::Roof, std::nan(""), 1.0}}};
    CHECK_FALSE(is_feasible(nan, tol));
}

TEST_CASE("relaxed shear limit leaves every shear residual negative", "[model]") {
    BuildingParams p = apply_overrides(BuildingParams{}, {{"tau_allw", 1e6}});
    const auto a = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7);
    const auto s = derive_state(p, a, br2_example_point());
    const auto res = constraint_residuals(p, a, s);
    int shear = 0;
    for (const auto& r : res.entries) {
        if (std::string_view(r.id).find("shear") == std::string_view::npos) continue;
        ++shear;
        CHECK(r.value < 0.0);
    }
    CHECK(shear == 6);
}

TEST_CASE("residual vector has the documented groups", "[model]") {
    BuildingParams p;
    const auto a = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7);
    const auto res = constraint_residuals(p, a, derive_state(p, a, br2_example_point()));
    std::map<ConstraintGroup, int> counts;
    for (const auto& r : res.entries) ++counts[r.group];
    CHECK(counts[ConstraintGroup::Roof] == 2);
    CHECK(counts[ConstraintGroup::FloorArea] == 1);
    CHECK(counts[ConstraintGroup::WallStressX] == 6);
    CHECK(counts[ConstraintGroup::WallStressY] == 6);
    CHECK(counts[ConstraintGroup::Openings] == 6);
    CHECK(counts[ConstraintGroup::Foundation] == 4);
    CHECK(res.find("floor_area"));
    CHECK(res.find("openings_rebar_spacing"));
}

TEST_CASE("derived-state identities hold on random inputs", "[model][property]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& cat = fixtures::case_catalog();
    const auto walls = cat.of_class(ComponentClass::Wall);
    const auto roofs = cat.of_class(ComponentClass::Roof);
    const auto covers = cat.of_class(ComponentClass::RoofCover);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        BuildingParams p;
        p.B_fo = 0.5 + 1.5 * u(rng);
        p.n_rm = 1 + static_cast<int>(rng() % 5);
        DiscreteAssignment a{walls[rng() % walls.size()], walls[rng() % walls.size()], roofs[rng() % roofs.size()],
                             covers[rng() % covers.size()], 2 + static_cast<int>(rng() % 19), 2, false, false};
        a.foundation.component = ComponentClass::Foundation;
        const ContinuousPoint x{0.1 + u(rng), 2.7 + 1.1 * u(rng), 2.0 + 2.5 * u(rng), 2.0 + 2.5 * u(rng),
                                0.1 + 0.5 * u(rng), 1.1 + 2.0 * u(rng), 1.0 + u(rng)};
        const auto s = derive_state(p, a, x);
        const double t = x.t_wa, h = x.h_wa, n = p.n_rm;

        worst = std::max(worst, rel(s.l_x_wa, x.l_x_fl + 2.0 * t));
        worst = std::max(worst, rel(s.l_x_wa - s.l_y_wa, x.l_x_fl - x.l_y_fl));
        worst = std::max(worst, rel(s.F_e, 0.5 * s.F_1));
        worst = std::max(worst, rel(s.v_co_tot, p.R_co * s.v_slc_tot));
        worst = std::max(worst, rel(s.e, 0.5 * (p.B_fo - 2.0 * x.t_fo - t)));
        worst = std::max(worst, rel(6.0 * s.S_x, s.A_wa_x * s.l_x_wa));
        // Gross wall faces from the section areas, minus the openings.
        const double gross = 2.0 * h * (s.A_wa_x + s.A_wa_y - 2.0 * t * t);
        worst = std::max(worst, rel(s.v_wa + t * (x.w_do * p.h_do + x.l_wi * x.l_wi), gross));
        worst = std::max(worst, rel(s.v_wa_tot, n * s.v_wa - (n - 1.0) * h * s.A_wa_x));
        worst = std::max(worst, rel(s.M_w_x / s.F_w_x, h));

        const auto again = derive_state(p, a, x);
        CHECK(std::memcmp(&again.v_wa_tot, &s.v_wa_tot, sizeof(double)) == 0);
        CHECK(std::memcmp(&again.v_fo_tot, &s.v_fo_tot, sizeof(double)) == 0);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("objective lower bounds hold over the search box", "[model][property]") {
    BuildingParams p;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto* names : {"So2/Br2/Wo/Pl/7", "Br2/Br2/Ba/Ba/12", "Co1/St1/Wo/Ba/3"}) {
        const std::string key = names;
        const auto parts = [&] {
            std::vector<std::string> out;
            std::string cur;
            for (char c : key) {
                if (c == '/') {
                    out.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            out.push_back(cur);
            return out;
        }();
        for (bool x_wa : {false, true}) {
            const auto a = fixtures::assignment(parts[0], parts[1], parts[2], parts[3], std::stoi(parts[4]), false, x_wa);
            const auto lb = objective_lower_bounds(p, a);
            const auto box = continuous_bounds(p, a);
            for (int i = 0; i < 2000; ++i) {
                std::array<double, kContinuousDims> v{};
                for (int j = 0; j < kContinuousDims; ++j) v[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * u(rng);
                const auto s = derive_state(p, a, ContinuousPoint::from_array(v.data()));
                if (s.inconsistent) continue;
                CHECK(cost(p, a, s) >= lb.cost * (1.0 - 1e-12));
                CHECK(embodied_energy(p, a, s) >= lb.ee * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("big-M wall orientation residuals agree with the branch bit", "[model]") {
    BuildingParams p;
    auto x = br2_example_point();
    x.l_x_fl = 3.0;
    x.l_y_fl = 3.6;
    const auto wide_y = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7, false, true);
    const auto r_ok = big_m_wall_residuals(p, wide_y, derive_state(p, wide_y, x));
    CHECK(r_ok[0] <= 0.0);
    CHECK(r_ok[1] <= 0.0);
    const auto wrong = fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7, false, false);
    const auto r_bad = big_m_wall_residuals(p, wrong, derive_state(p, wrong, x));
    CHECK(std::max(r_bad[0], r_bad[1]) > 0.0);
}

TEST_CASE("structural pre-check rejects impossible assignments", "[model]") {
    BuildingParams p;
    CHECK_FALSE(structurally_infeasible(p, fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7, false, true)));
    CHECK(structurally_infeasible(p, fixtures::assignment("Br2", "Br2", "Wo", "Pl", 21, false, true)));
    BuildingParams narrow = apply_overrides(p, {{"l_fl_max", 2.0}, {"l_fl_min", 2.0}});
    CHECK(structurally_infeasible(narrow, fixtures::assignment("Br2", "Br2", "Wo", "Pl", 7)));
}
