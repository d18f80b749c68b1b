#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <set>

#include "fixtures.hpp"

using namespace ecomason;
using Catch::Approx;

namespace {

// Independent count: nested loops over the catalog with the rules written out by hand.
std::size_t brute_count(const MaterialCatalog& cat, bool link, const std::string& wall_fixed = "") {
    std::size_t tuples = 0;
    for (const auto& w : cat.of_class(ComponentClass::Wall)) {
        if (!wall_fixed.empty() && w.name != wall_fixed) continue;
        for (const auto& f : cat.of_class(ComponentClass::Foundation)) {
            const bool wb = w.name.rfind("Br", 0) == 0, fb = f.name.rfind("Br", 0) == 0;
            if (link && wb && fb && w.grade != f.grade) continue;
            tuples += cat.count(ComponentClass::Roof) * cat.count(ComponentClass::RoofCover);
        }
    }
    return tuples * 19 * 4;
}

}  // namespace

TEST_CASE("enumeration counts", "[enumerator]") {
    ScenarioConfig none;
    none.finalize();
    CHECK(enumerate_discrete(none).size() == brute_count(none.catalog, false));
    CHECK(enumerate_discrete(none).size() == 8 * 8 * 2 * 2 * 19 * 4);

    ScenarioConfig rebar;
    rebar.exhaustive_rebar = true;
    rebar.finalize();
    const auto& p = rebar.params;
    int n_re_max = p.n_re_min;
    while ((n_re_max + 1) * p.d_re + n_re_max * p.s_re_min <= p.t_wa_max) ++n_re_max;
    CHECK(n_re_max > p.n_re_min);
    CHECK(enumerate_discrete(rebar).size() ==
          brute_count(rebar.catalog, false) * static_cast<std::size_t>(n_re_max - p.n_re_min + 1));

    const auto linked = default_scenario();
    CHECK(enumerate_discrete(linked).size() == brute_count(linked.catalog, true));
    CHECK(enumerate_discrete(linked).size() == 18848);

    ScenarioConfig br2 = default_scenario();
    br2.rules.push_back(ScenarioRule::fix_wall_material("Br2"));
    br2.finalize();
    CHECK(enumerate_discrete(br2).size() == brute_count(br2.catalog, true, "Br2"));
    CHECK(enumerate_discrete(br2).size() == 7 * 2 * 2 * 19 * 4);

    CHECK(enumerate_discrete(fixtures::pinned_scenario()).size() == 76);

    for (const auto& a : enumerate_discrete(linked)) {
        REQUIRE(a.n_re == 2);
        REQUIRE(satisfies_rules(linked.rules, a));
    }
}

TEST_CASE("scenario documents", "[enumerator][scenario]") {
    const auto defaults = default_scenario();
    CHECK(parse_scenario("{}").fingerprint() == defaults.fingerprint());

    const auto tweaked = parse_scenario(R"({"param_overrides": {"B_fo": 0.81}})");
    CHECK(tweaked.params.B_fo == Approx(0.81));
    CHECK(tweaked.fingerprint() != defaults.fingerprint());

    const auto seeded = parse_scenario(R"({"solver": {"seed": 5}})");
    CHECK(seeded.fingerprint() != defaults.fingerprint());

    const auto soil = parse_scenario(R"({"exclude_materials": ["So1", "So2"], "objective": "min_cost"})");
    CHECK(soil.catalog.count(ComponentClass::Wall) == 6);
    CHECK(soil.objective == ScenarioObjective::MinCost);
    CHECK(parse_scenario(scenario_to_json(soil)).fingerprint() == soil.fingerprint());

    CHECK_THROWS_AS(parse_scenario(R"({"colour": 1})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"param_overrides": {"B_fo": "wide"}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"param_overrides": {"bogus": 1}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[1,2"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"rules": [{"rule": "fix_wall_material", "material": "Zz"}]})"),
                    ScenarioError);
    CHECK_THROWS_WITH(parse_scenario(R"({"exclude_materials": ["Wo", "Ba"]})"), "empty class set: roof");
}

TEST_CASE("budget below every price bound is infeasible", "[enumerator]") {
    const auto s = fixtures::pinned_scenario();
    MinlpEngine engine(s, 1);
    MinlpQuery q;
    q.budget = 100.0;
    const auto r = engine.solve(q);
    CHECK_FALSE(r.design);
    CHECK_THAT(r.diagnostic, Catch::Matchers::ContainsSubstring("below the minimum achievable cost"));
    CHECK_FALSE(solve_minlp(s, 0.0));
    CHECK_FALSE(solve_minlp(s, 100.0));
}

TEST_CASE("engine result equals the serial minimum over assignments", "[enumerator][property]") {
    const auto s = fixtures::pinned_scenario();
    MinlpEngine engine(s, 1);
    for (double budget : {6300.0, 6414.0, 7000.0}) {
        MinlpQuery q;
        q.budget = budget;
        const auto got = engine.solve(q);

        std::optional<double> best;
        for (const auto& a : enumerate_discrete(s)) {
            if (structurally_infeasible(s.params, a)) continue;
            ContinuousProblem prob;
            prob.assign = a;
            prob.params = s.params;
            prob.side.push_back({SideConstraint::Kind::CostAtMost, budget});
            const auto r = solve_continuous(prob, s.solver);
            if (r.ok() && (!best || r.objective_value < *best)) best = r.objective_value;
        }
        REQUIRE(got.design.has_value() == best.has_value());
        if (best) CHECK(got.design->ee * 1000.0 == Approx(*best).epsilon(1e-3));
    }
}

TEST_CASE("serial and parallel engines agree", "[enumerator][property]") {
    const auto s = fixtures::pinned_scenario("So1", "Br1");
    MinlpEngine serial(s, 1);
    MinlpEngine parallel(s, 4);
    REQUIRE(serial.profiles().size() == parallel.profiles().size());
    for (std::size_t i = 0; i < serial.profiles().size(); ++i) {
        CHECK(serial.profiles()[i].assign.key() == parallel.profiles()[i].assign.key());
        CHECK(serial.profiles()[i].min_ee_point == parallel.profiles()[i].min_ee_point);
        CHECK(serial.profiles()[i].min_cost_point == parallel.profiles()[i].min_cost_point);
    }
    for (double budget : {5500.0, 6500.0, 9000.0}) {
        MinlpQuery q;
        q.budget = budget;
        const auto a = serial.solve(q), b = parallel.solve(q);
        REQUIRE(a.design.has_value() == b.design.has_value());
        if (a.design) CHECK(a.design->point == b.design->point);
    }
}

TEST_CASE("cost-cap pruning never removes an affordable design", "[enumerator][property]") {
    const auto s = fixtures::pinned_scenario();
    const double budget = 6414.0;
    MinlpEngine full(s, 1);
    MinlpEngine capped(s, 1, budget);
    CHECK(capped.pruned() >= full.pruned());
    MinlpQuery q;
    q.budget = budget;
    const auto a = full.solve(q), b = capped.solve(q);
    REQUIRE(a.design);
    REQUIRE(b.design);
    CHECK(a.design->point == b.design->point);

    // Force-solve the assignments the cap removed.
    std::set<std::string> kept;
    for (const auto& p : capped.profiles()) kept.insert(p.assign.key());
    int forced = 0;
    for (const auto& a2 : enumerate_discrete(s)) {
        if (kept.count(a2.key()) || structurally_infeasible(s.params, a2)) continue;
        ContinuousProblem prob;
        prob.assign = a2;
        prob.params = s.params;
        prob.side.push_back({SideConstraint::Kind::CostAtMost, budget});
        CHECK_FALSE(solve_continuous(prob, s.solver).ok());
        if (++forced == 8) break;
    }
}

TEST_CASE("minimum EE is nonincreasing in the budget", "[enumerator][property]") {
    MinlpEngine engine(fixtures::pinned_scenario(), 1);
    double previous = std::numeric_limits<double>::infinity();
    for (double budget = 6300.0; budget <= 8500.0; budget += 100.0) {
        MinlpQuery q;
        q.budget = budget;
        const auto r = engine.solve(q);
        if (!r.design) continue;
        CHECK(r.design->ee <= previous * (1.0 + 1e-9));
        CHECK(r.design->cost <= budget * (1.0 + 1e-6));
        previous = r.design->ee;
    }
    CHECK(std::isfinite(previous));
}

TEST_CASE("designs re-evaluate to their stored cost and energy", "[enumerator]") {
    MinlpEngine engine(fixtures::pinned_scenario(), 1);
    const auto r = engine.solve({});
    REQUIRE(r.design);
    const auto& d = *r.design;
    const auto s = derive_state(engine.scenario().params, d.assign, d.point);
    CHECK(d.cost == Approx(cost(engine.scenario().params, d.assign, s)));
    CHECK(d.ee * 1000.0 == Approx(embodied_energy(engine.scenario().params, d.assign, s)));
    CHECK(d.provenance.solver_version == kSolverVersion);
    CHECK(is_feasible(constraint_residuals(engine.scenario().params, d.assign, s), 1e-6));
}

TEST_CASE("restricted engines drop excluded materials without re-solving", "[enumerator]") {
    MinlpEngine engine(fixtures::pinned_scenario(), 1);
    const auto unused = engine.restricted({"St1"});
    CHECK(unused.profiles().size() == engine.profiles().size());
    CHECK_THROWS_WITH(engine.restricted({"So2"}), Catch::Matchers::ContainsSubstring("So2"));
    CHECK_THROWS_AS(engine.restricted({"Wo", "Ba"}), EmptyClassError);
}

TEST_CASE("brick walls need no wider foundation", "[enumerator]") {
    const auto s = fixtures::pinned_scenario("Br2", "Br2");
    const auto w = min_feasible_foundation_width(s, "Br2", 1);
    REQUIRE(w);
    CHECK(*w <= 0.80 + 1e-9);
    CHECK_THROWS_AS(min_feasible_foundation_width(s, "Nope", 1), ScenarioError);
}
