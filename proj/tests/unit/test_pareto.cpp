#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "ecomason/canonical_json.hpp"
#include "ecomason/front_io.hpp"
#include "ecomason/pareto.hpp"
#include "fixtures.hpp"

using namespace ecomason;
using Catch::Approx;

namespace {

// So2 walls on Br2 foundations with free roof and cover: the E to I segment of the case-study front.
ScenarioConfig so2_scenario() {
    ScenarioConfig s;
    s.rules = {ScenarioRule::link_brick_grades(), ScenarioRule::fix_wall_material("So2"),
               ScenarioRule::fix_material(ComponentClass::Foundation, "Br2")};
    s.solver.starts = 8;
    s.finalize();
    return s;
}

const MinlpEngine& pinned_engine() {
    static const MinlpEngine engine(so2_scenario(), 1);
    return engine;
}

Design design_e() {
    MinlpQuery q;
    q.budget = 6414.0;
    auto r = pinned_engine().solve(q);
    if (!r.design) throw std::runtime_error("design E fixture missing");
    return *r.design;
}

const ParetoFront& pinned_front() {
    static const ParetoFront front = epsilon_constraint_front(pinned_engine(), 6300.0, 8500.0, 23);
    return front;
}

std::vector<std::size_t> brute_nondominated(const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            if (j == i) continue;
            const bool weakly = pts[j].first <= pts[i].first && pts[j].second <= pts[i].second;
            const bool equal = pts[j] == pts[i];
            dominated = (weakly && !equal) || (equal && j < i);
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

void check_cost_front(const ParetoFront& f) {
    for (std::size_t i = 1; i < f.points.size(); ++i) {
        CHECK(f.points[i - 1].x < f.points[i].x);
        CHECK(f.points[i - 1].y > f.points[i].y);
    }
}

}  // namespace

TEST_CASE("nondominated filter on a small example", "[pareto]") {
    const std::vector<std::pair<double, double>> pts{{1, 5}, {2, 3}, {3, 4}, {2, 3}, {4, 1}, {5, 1}};
    CHECK(nondominated_indices(pts) == std::vector<std::size_t>{0, 1, 4});

    const std::vector<std::pair<std::pair<double, double>, char>> tagged{{{1, 5}, 'a'}, {{3, 4}, 'b'}, {{2, 2}, 'c'}};
    const auto kept = nondominated_filter(tagged);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].second == 'a');
    CHECK(kept[1].second == 'c');
    CHECK(nondominated_indices({}).empty());
}

TEST_CASE("nondominated filter equals brute-force dominance", "[pareto][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 1000;
        // Coarse coordinates force ties and duplicates.
        const int span = trial % 2 ? 20 : 1000;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.emplace_back(static_cast<double>(rng() % span), static_cast<double>(rng() % span));
        REQUIRE(nondominated_indices(pts) == brute_nondominated(pts));
    }
}

TEST_CASE("cost fronts are sorted and nondominated", "[pareto][property]") {
    const auto& f = pinned_front();
    REQUIRE(f.points.size() >= 3);
    check_cost_front(f);
    CHECK(f.instances_solved >= 23);
    CHECK(f.scenario_fingerprint == pinned_engine().scenario().fingerprint());
    for (const auto& p : f.points) {
        CHECK(p.x == p.design.cost);
        CHECK(p.y == p.design.ee);
        CHECK(p.design.assign.wall.name == "So2");
    }
}

TEST_CASE("make_front keeps equal-coordinate designs as alternatives", "[pareto]") {
    const auto e = design_e();
    auto twin = e;
    twin.assign.x_e = !twin.assign.x_e;
    auto worse = e;
    worse.cost += 10.0;
    worse.ee += 1.0;
    worse.point.w_do += 0.01;
    const auto f = make_front({e, twin, worse, e}, FrontAxes::CostVsEe, pinned_engine().scenario().params);
    REQUIRE(f.points.size() == 1);
    REQUIRE(f.points[0].alternatives.size() == 1);
    CHECK(f.points[0].alternatives[0].assign.x_e == twin.assign.x_e);
}

TEST_CASE("EE along a budget sweep never increases", "[pareto][property]") {
    double previous = std::numeric_limits<double>::infinity();
    for (double budget = 6300.0; budget <= 8500.0; budget += 50.0) {
        MinlpQuery q;
        q.budget = budget;
        const auto r = pinned_engine().solve(q);
        if (!r.design) continue;
        CHECK(r.design->ee <= previous * (1.0 + 1e-9));
        previous = r.design->ee;
    }
    for (const auto& p : pinned_front().points) {
        MinlpQuery q;
        q.budget = p.x;
        const auto r = pinned_engine().solve(q);
        REQUIRE(r.design);
        CHECK(r.design->ee <= p.y * (1.0 + pinned_engine().scenario().solver.tolerance));
    }
}

TEST_CASE("price shift moves affected designs by volume times price change", "[pareto]") {
    const auto e = design_e();
    CHECK(e.cost == Approx(6414.0).margin(1.0));
    CHECK(e.state.v_wa_tot == Approx(22.80).epsilon(0.01));
    const auto f = make_front({e}, FrontAxes::CostVsEe, pinned_engine().scenario().params);

    const auto shifted = price_shift(f, "So2", e.assign.wall.unit_cost + 10.0);
    REQUIRE(shifted.points.size() == 1);
    CHECK(shifted.points[0].x == Approx(e.cost + 10.0 * e.state.v_wa_tot).margin(1e-9));
    CHECK(shifted.points[0].x == Approx(6642.0).margin(1.5));
    CHECK(shifted.points[0].y == e.ee);
    CHECK(shifted.points[0].design.assign.wall.unit_cost == e.assign.wall.unit_cost + 10.0);

    CHECK(front_to_json(price_shift(f, "So2", e.assign.wall.unit_cost)) == front_to_json(f));
    const auto once = price_shift(pinned_front(), "So2", 170.0);
    CHECK(front_to_json(price_shift(once, "So2", 170.0)) == front_to_json(once));

    // Br2 sits in the foundation only; restricting to the wall class leaves it alone.
    const auto wall_only = price_shift(f, "Br2", 999.0, ComponentClass::Wall);
    CHECK(front_to_json(wall_only) == front_to_json(f));
    const auto foundation = price_shift(f, "Br2", e.assign.foundation.unit_cost + 1.0, ComponentClass::Foundation);
    CHECK(foundation.points[0].x == Approx(e.cost + e.state.v_fo_tot).margin(1e-9));
}

TEST_CASE("price threshold is where the design meets the budget", "[pareto]") {
    const auto e = design_e();
    CHECK(price_threshold(e, e.cost, "So2") == Approx(e.assign.wall.unit_cost));
    const double t = price_threshold(e, 7000.0, "So2");
    CHECK(t == Approx(145.0 + (7000.0 - e.cost) / e.state.v_wa_tot));
    CHECK(t == Approx(170.70).margin(0.1));
    const auto f = price_shift(make_front({e}, FrontAxes::CostVsEe, pinned_engine().scenario().params), "So2", t);
    CHECK(f.points[0].x == Approx(7000.0).margin(1e-6));
    CHECK_THROWS_AS(price_threshold(e, 7000.0, "St1"), std::invalid_argument);
}

TEST_CASE("unused material prices leave cost and energy unchanged", "[pareto][property]") {
    const auto& cat = fixtures::case_catalog();
    const auto entries = cat.entries();
    const BuildingParams params;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto walls = cat.of_class(ComponentClass::Wall);
        const auto founds = cat.of_class(ComponentClass::Foundation);
        const auto roofs = cat.of_class(ComponentClass::Roof);
        const auto covers = cat.of_class(ComponentClass::RoofCover);
        DiscreteAssignment a{walls[rng() % walls.size()], founds[rng() % founds.size()], roofs[rng() % roofs.size()],
                             covers[rng() % covers.size()], 2 + static_cast<int>(rng() % 19), 2, rng() % 2 == 1,
                             rng() % 2 == 1};
        const ContinuousPoint x{0.2 + 0.3 * u(rng), 2.2 + 0.6 * u(rng), 2.5 + 2.0 * u(rng), 2.5 + 2.0 * u(rng),
                                0.2 + 0.3 * u(rng), 0.8 + 0.4 * u(rng), 1.0 + 0.4 * u(rng)};
        const auto s = derive_state(params, a, x);
        const double c0 = cost(params, a, s), e0 = embodied_energy(params, a, s);

        // Re-price every catalog row the assignment does not use and rebuild the assignment from it.
        auto edited = entries;
        for (auto& m : edited) {
            const bool used = (m.component == ComponentClass::Wall && m.name == a.wall.name) ||
                              (m.component == ComponentClass::Foundation && m.name == a.foundation.name) ||
                              (m.component == ComponentClass::Roof && m.name == a.roof.name) ||
                              (m.component == ComponentClass::RoofCover && m.name == a.cover.name);
            if (used) continue;
            m.unit_cost *= 0.1 + 5.0 * u(rng);
            m.embodied_energy *= 0.1 + 5.0 * u(rng);
        }
        const MaterialCatalog other(edited);
        DiscreteAssignment b = a;
        b.wall = *other.find(a.wall.name, ComponentClass::Wall);
        b.foundation = *other.find(a.foundation.name, ComponentClass::Foundation);
        b.roof = *other.find(a.roof.name, ComponentClass::Roof);
        b.cover = *other.find(a.cover.name, ComponentClass::RoofCover);
        const auto sb = derive_state(params, b, x);
        REQUIRE(cost(params, b, sb) == c0);
        REQUIRE(embodied_energy(params, b, sb) == e0);
    }
    CHECK(front_to_json(price_shift(pinned_front(), "St1", 1.0)) == front_to_json(pinned_front()));
}

TEST_CASE("re-solving with the new price matches the shifted front", "[pareto][property]") {
    const auto shifted = price_shift(pinned_front(), "So2", 155.0);

    auto entries = fixtures::case_catalog().entries();
    for (auto& m : entries)
        if (m.name == "So2") m.unit_cost = 155.0;
    auto s = so2_scenario();
    s.catalog_override = MaterialCatalog(entries);
    s.finalize();
    const MinlpEngine engine(s, 1);
    for (const auto& p : shifted.points) {
        MinlpQuery q;
        q.budget = p.x;
        const auto r = engine.solve(q);
        REQUIRE(r.design);
        CHECK(r.design->ee == Approx(p.y).epsilon(5e-3));
        CHECK(r.design->cost <= p.x * (1.0 + 1e-6));
    }
}

TEST_CASE("clusters group by material tuple and slice count", "[pareto]") {
    const auto clusters = cluster_designs(pinned_front());
    REQUIRE(!clusters.empty());
    CHECK(clusters[0].label == "A");
    std::size_t members = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        members += clusters[i].members;
        CHECK(clusters[i].material_tuple.rfind("So2/", 0) == 0);
        CHECK(clusters[i].cost.first <= clusters[i].cost.second);
        if (i > 0) CHECK(clusters[i - 1].cost.first <= clusters[i].cost.first);
    }
    CHECK(members == pinned_front().points.size());

    const auto single = cluster_designs(make_front({design_e()}, FrontAxes::CostVsEe, BuildingParams{}));
    REQUIRE(single.size() == 1);
    CHECK(single[0].cost.first == single[0].cost.second);
    CHECK(single[0].members == 1);
}

TEST_CASE("cluster labels continue past Z", "[pareto]") {
    const BuildingParams params;
    const ContinuousPoint x{0.3, 2.5, 3.0, 3.0, 0.3, 1.0, 1.0};
    ParetoFront f;
    for (const char* cover : {"Pl", "Ba"})
        for (int n = 2; n <= 20; ++n) {
            FrontPoint p;
            p.design = make_design(params, fixtures::assignment("So2", "Br2", "Wo", cover, n), x);
            f.points.push_back(p);
        }
    const auto clusters = cluster_designs(f);
    REQUIRE(clusters.size() == 38);
    CHECK(clusters[25].label == "Z");
    CHECK(clusters[26].label == "AA");
    CHECK(clusters[37].label == "AL");
}

TEST_CASE("area fronts trade floor area against EE", "[pareto]") {
    const auto f = floor_area_front(pinned_engine(), 7000.0, 10.0, 14.0, 5);
    REQUIRE(!f.points.empty());
    CHECK(f.axes == FrontAxes::AreaVsEe);
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        const auto& d = f.points[i].design;
        CHECK(f.points[i].x == Approx(d.point.l_x_fl * d.point.l_y_fl));
        CHECK(d.cost <= 7000.0 * (1.0 + 1e-6));
        if (i > 0) {
            CHECK(f.points[i - 1].x < f.points[i].x);
            CHECK(f.points[i - 1].y < f.points[i].y);
        }
    }
    CHECK_THROWS_AS(floor_area_front(pinned_engine(), 7000.0, 14.0, 10.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_constraint_front(pinned_engine(), 5000.0, 6000.0, 1), std::invalid_argument);
}

TEST_CASE("front JSON and CSV round trip", "[pareto][io]") {
    const auto& f = pinned_front();
    const auto j = front_to_json(f);
    const auto back = front_from_json(j);
    CHECK(canonical_dump(front_to_json(back)) == canonical_dump(j));
    CHECK(back.points.size() == f.points.size());
    CHECK(j.at("axes") == "cost_vs_ee");
    CHECK(j.at("clusters").size() == cluster_designs(f).size());

    const auto csv = front_to_csv(f);
    std::istringstream in(csv);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    CHECK(line == kFrontCsvHeader);
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows >= f.points.size());
    CHECK(front_json_to_csv(j) == csv);
}
