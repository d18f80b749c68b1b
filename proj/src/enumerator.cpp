#include "ecomason/enumerator.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <thread>

namespace ecomason {

int default_worker_count() {
    if (const char* env = std::getenv("ECOMASON_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    tbb::task_arena arena(workers);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1), [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
        });
    });
}

bool satisfies_rules(const std::vector<ScenarioRule>& rules, const DiscreteAssignment& a) {
    for (const auto& rule : rules) {
        switch (rule.kind) {
            case ScenarioRule::Kind::LinkBrickGrades:
                if (a.wall.family() == "Br" && a.foundation.family() == "Br" && a.wall.grade != a.foundation.grade)
                    return false;
                break;
            case ScenarioRule::Kind::FixMaterial: {
                const MaterialSpec* m = nullptr;
                switch (rule.component) {
                    case ComponentClass::Wall: m = &a.wall; break;
                    case ComponentClass::Foundation: m = &a.foundation; break;
                    case ComponentClass::Roof: m = &a.roof; break;
                    case ComponentClass::RoofCover: m = &a.cover; break;
                }
                if (m->name != rule.material) return false;
                break;
            }
        }
    }
    return true;
}

std::vector<DiscreteAssignment> enumerate_discrete(const ScenarioConfig& scenario) {
    const auto& p = scenario.params;
    const auto walls = scenario.catalog.of_class(ComponentClass::Wall);
    const auto foundations = scenario.catalog.of_class(ComponentClass::Foundation);
    const auto roofs = scenario.catalog.of_class(ComponentClass::Roof);
    const auto covers = scenario.catalog.of_class(ComponentClass::RoofCover);

    int n_re_max = p.n_re_min;
    if (scenario.exhaustive_rebar) {
        while ((n_re_max + 1) * p.d_re + n_re_max * p.s_re_min <= p.t_wa_max) ++n_re_max;
    }

    std::vector<DiscreteAssignment> out;
    for (const auto& w : walls)
        for (const auto& f : foundations)
            for (const auto& r : roofs)
                for (const auto& c : covers)
                    for (int n = p.n_slc_min; n <= p.n_slc_max; ++n)
                        for (int n_re = p.n_re_min; n_re <= n_re_max; ++n_re)
                            for (int xe = 0; xe < 2; ++xe)
                                for (int xwa = 0; xwa < 2; ++xwa) {
                                    DiscreteAssignment a{w, f, r, c, n, n_re, xe == 1, xwa == 1};
                                    if (satisfies_rules(scenario.rules, a)) out.push_back(std::move(a));
                                }
    if (out.empty()) throw ScenarioError("empty enumeration after scenario rules");
    return out;
}

Design make_design(const BuildingParams& params, const DiscreteAssignment& assign, const ContinuousPoint& point,
                   Provenance provenance) {
    Design d;
    d.assign = assign;
    d.point = point;
    d.state = derive_state(params, assign, point);
    d.cost = cost(params, assign, d.state);
    d.ee = embodied_energy(params, assign, d.state) / 1000.0;
    d.provenance = std::move(provenance);
    return d;
}

MinlpEngine::MinlpEngine(ScenarioConfig scenario, int workers, std::optional<double> cost_cap)
    : scenario_(std::move(scenario)), workers_(std::max(1, workers)) {
    auto all = enumerate_discrete(scenario_);
    enumerated_ = all.size();
    std::vector<DiscreteAssignment> candidates;
    for (auto& a : all) {
        if (structurally_infeasible(scenario_.params, a)) {
            ++pruned_;
            continue;
        }
        if (cost_cap && objective_lower_bounds(scenario_.params, a).cost > *cost_cap) {
            ++pruned_;
            continue;
        }
        candidates.push_back(std::move(a));
    }
    build_profiles(candidates);
    sort_profiles();
}

void MinlpEngine::build_profiles(const std::vector<DiscreteAssignment>& candidates) {
    profiles_.assign(candidates.size(), AssignmentProfile{});
    const auto& params = scenario_.params;
    const auto& config = scenario_.solver;
    parallel_for(candidates.size(), workers_, [&](std::size_t i) {
        AssignmentProfile prof;
        prof.assign = candidates[i];
        prof.bounds = objective_lower_bounds(params, prof.assign);
        ContinuousProblem problem;
        problem.params = params;
        problem.assign = prof.assign;
        problem.objective = Objective::MinCost;
        prof.min_cost_report = solve_continuous(problem, config);
        if (prof.min_cost_report.ok()) {
            prof.feasible = true;
            prof.min_cost = prof.min_cost_report.objective_value;
            prof.min_cost_point = prof.min_cost_report.point;
            problem.objective = Objective::MinEmbodiedEnergy;
            const ContinuousPoint warm[] = {prof.min_cost_point};
            prof.min_ee_report = solve_continuous(problem, config, warm);
            const auto at_min_cost = make_design(params, prof.assign, prof.min_cost_point);
            prof.max_ee = at_min_cost.ee * 1000.0;
            if (prof.min_ee_report.ok() && prof.min_ee_report.objective_value <= prof.max_ee) {
                prof.min_ee = prof.min_ee_report.objective_value;
                prof.min_ee_point = prof.min_ee_report.point;
            } else {
                prof.min_ee = prof.max_ee;
                prof.min_ee_point = prof.min_cost_point;
                prof.min_ee_report = prof.min_cost_report;
            }
            prof.min_ee_cost = make_design(params, prof.assign, prof.min_ee_point).cost;
        }
        profiles_[i] = std::move(prof);
    });
}

void MinlpEngine::sort_profiles() {
    std::sort(profiles_.begin(), profiles_.end(),
              [](const AssignmentProfile& a, const AssignmentProfile& b) { return a.assign.key() < b.assign.key(); });
    order_.clear();
    for (std::size_t i = 0; i < profiles_.size(); ++i)
        if (profiles_[i].feasible) order_.push_back(i);
    const bool by_cost = scenario_.objective == ScenarioObjective::MinCost;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        const double la = by_cost ? profiles_[a].min_cost : profiles_[a].min_ee;
        const double lb = by_cost ? profiles_[b].min_cost : profiles_[b].min_ee;
        return la < lb;
    });
}

MinlpEngine MinlpEngine::restricted(const std::set<std::string>& excluded) const {
    MinlpEngine out;
    out.scenario_ = scenario_;
    for (const auto& name : excluded) out.scenario_.exclude_materials.insert(name);
    out.scenario_.finalize();
    out.workers_ = workers_;
    out.enumerated_ = enumerate_discrete(out.scenario_).size();
    for (const auto& prof : profiles_) {
        const auto& a = prof.assign;
        auto kept = [&](const MaterialSpec& m) { return out.scenario_.catalog.find(m.name, m.component) != nullptr; };
        if (kept(a.wall) && kept(a.foundation) && kept(a.roof) && kept(a.cover)) out.profiles_.push_back(prof);
    }
    out.pruned_ = out.enumerated_ - out.profiles_.size();
    out.sort_profiles();
    return out;
}

MinlpResult MinlpEngine::solve(const MinlpQuery& query) const {
    MinlpResult result;
    const auto& params = scenario_.params;
    const double tol = scenario_.solver.tolerance;
    const bool min_cost = scenario_.objective == ScenarioObjective::MinCost;

    auto satisfies = [&](const Design& d) {
        if (query.budget && d.cost - *query.budget > tol * std::max(std::abs(*query.budget), 1.0)) return false;
        if (query.ee_cap && d.ee * 1000.0 - *query.ee_cap > tol * std::max(std::abs(*query.ee_cap), 1.0))
            return false;
        if (query.area_min &&
            *query.area_min - d.point.l_x_fl * d.point.l_y_fl > tol * std::max(std::abs(*query.area_min), 1.0))
            return false;
        return true;
    };

    bool have = false;
    double best_value = 0.0;
    for (std::size_t idx : order_) {
        const auto& prof = profiles_[idx];
        const double lower = min_cost ? prof.min_cost : prof.min_ee;
        if (have && lower >= best_value) break;
        if (query.budget && prof.min_cost > *query.budget * (1.0 + tol)) continue;
        if (query.ee_cap && prof.min_ee > *query.ee_cap * (1.0 + tol)) continue;
        if (query.admissible && !query.admissible(idx)) continue;

        const ContinuousPoint& cached = min_cost ? prof.min_cost_point : prof.min_ee_point;
        const SolveReport& cached_report = min_cost ? prof.min_cost_report : prof.min_ee_report;
        Design candidate = make_design(params, prof.assign, cached,
                                       {cached_report.seed, cached_report.starts_used, kSolverVersion});
        if (!satisfies(candidate)) {
            ContinuousProblem problem;
            problem.params = params;
            problem.assign = prof.assign;
            problem.objective = min_cost ? Objective::MinCost : Objective::MinEmbodiedEnergy;
            if (query.budget) problem.side.push_back({SideConstraint::Kind::CostAtMost, *query.budget});
            if (query.ee_cap) problem.side.push_back({SideConstraint::Kind::EmbodiedEnergyAtMost, *query.ee_cap});
            if (query.area_min && *query.area_min > params.A_fl_min)
                problem.side.push_back({SideConstraint::Kind::FloorAreaAtLeast, *query.area_min});
            const ContinuousPoint warm[] = {prof.min_cost_point, prof.min_ee_point};
            SolveReport report = solve_continuous(problem, scenario_.solver, warm);
            ++result.subproblems;
            if (!report.ok()) continue;
            candidate = make_design(params, prof.assign, report.point,
                                    {report.seed, report.starts_used, kSolverVersion});
        }
        const double value = min_cost ? candidate.cost : candidate.ee * 1000.0;
        if (!have || value < best_value) {
            have = true;
            best_value = value;
            result.design = std::move(candidate);
        }
    }
    if (!have) result.diagnostic = diagnose(query);
    return result;
}

std::string MinlpEngine::diagnose(const MinlpQuery& query) const {
    if (order_.empty()) {
        std::map<std::string, int> blocking;
        for (const auto& prof : profiles_) {
            ContinuousProblem problem;
            problem.params = scenario_.params;
            problem.assign = prof.assign;
            auto ev = evaluate(problem, prof.min_cost_report.point, scenario_.params.B_fo);
            if (const auto* worst = ev.residuals.worst()) ++blocking[std::string(to_string(worst->group))];
        }
        if (profiles_.empty())
            return "no assignment passes the structural pre-check (blocked by foundation or roof geometry)";
        auto it = std::max_element(blocking.begin(), blocking.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
        return "no assignment admits a feasible point; most often blocked by residual group: " + it->first;
    }
    double cheapest = profiles_[order_.front()].min_cost;
    for (std::size_t idx : order_) cheapest = std::min(cheapest, profiles_[idx].min_cost);
    if (query.budget && *query.budget < cheapest)
        return "budget " + std::to_string(*query.budget) + " is below the minimum achievable cost " +
               std::to_string(cheapest);
    return "no assignment satisfies the side constraints (residual group: side)";
}

std::optional<Design> solve_minlp(const ScenarioConfig& scenario, std::optional<double> budget) {
    if (budget && !(*budget > 0.0)) return std::nullopt;
    MinlpEngine engine(scenario, default_worker_count(), budget);
    MinlpQuery query;
    query.budget = budget;
    return engine.solve(query).design;
}

std::optional<double> min_feasible_foundation_width(const ScenarioConfig& scenario, const std::string& wall_material,
                                                    int workers) {
    if (!scenario.catalog.find(wall_material, ComponentClass::Wall))
        throw ScenarioError("unknown wall material: " + wall_material);
    ScenarioConfig fixed = scenario;
    fixed.rules.push_back(ScenarioRule::fix_wall_material(wall_material));
    const auto assignments = enumerate_discrete(fixed);

    double t_fo_min = 1e300;
    for (const auto& a : assignments) t_fo_min = std::min(t_fo_min, a.foundation.min_thickness.value_or(0.0));

    auto feasible_at = [&](double width) {
        BuildingParams params = fixed.params;
        params.B_fo = width;
        std::vector<const DiscreteAssignment*> open;
        for (const auto& a : assignments)
            if (!structurally_infeasible(params, a)) open.push_back(&a);
        // Probe in batches so a feasible design found early stops the search.
        const std::size_t batch = static_cast<std::size_t>(std::max(1, workers));
        for (std::size_t start = 0; start < open.size(); start += batch) {
            const std::size_t n = std::min(batch, open.size() - start);
            std::vector<char> ok(n, 0);
            parallel_for(n, workers,
                         [&](std::size_t i) { ok[i] = feasibility_probe(params, *open[start + i], fixed.solver); });
            if (std::any_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) return true;
        }
        return false;
    };

    double lo = 2.0 * t_fo_min;
    double hi = 2.0;
    if (!feasible_at(hi)) return std::nullopt;
    if (feasible_at(lo)) return lo;
    while (hi - lo > 0.005) {
        const double mid = 0.5 * (lo + hi);
        if (feasible_at(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace ecomason
