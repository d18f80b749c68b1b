#include "ecomason/pareto.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ecomason {

std::vector<std::size_t> nondominated_indices(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });
    std::vector<std::size_t> kept;
    double best_b = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        if (points[i].second < best_b) {
            kept.push_back(i);
            best_b = points[i].second;
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

double floor_area(const Design& d) { return d.point.l_x_fl * d.point.l_y_fl; }

std::pair<double, double> coordinates(const Design& d, FrontAxes axes) {
    return axes == FrontAxes::CostVsEe ? std::pair{d.cost, d.ee} : std::pair{-floor_area(d), d.ee};
}

bool same_design(const Design& a, const Design& b) {
    return a.assign.key() == b.assign.key() && a.point == b.point;
}

std::string signature(const std::optional<Design>& d) {
    if (!d) return "-";
    return d->assign.material_tuple() + "|" + std::to_string(d->assign.n_slc);
}

// Solves queries on a grid, then bisects between neighbours whose designs differ.
std::vector<std::optional<Design>> adaptive_sweep(const MinlpEngine& engine, double lo, double hi, int steps,
                                                  const SweepOptions& options,
                                                  const std::function<MinlpQuery(double)>& make_query,
                                                  int& instances) {
    std::vector<double> grid;
    for (int k = 0; k < steps; ++k) grid.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::map<double, std::optional<Design>> solved;
    auto run = [&](const std::vector<double>& values) {
        std::vector<std::optional<Design>> out(values.size());
        parallel_for(values.size(), engine.workers(), [&](std::size_t i) { out[i] = engine.solve(make_query(values[i])).design; });
        instances += static_cast<int>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) solved[values[i]] = std::move(out[i]);
    };
    run(grid);
    for (int depth = 0; depth < options.refine_depth; ++depth) {
        std::vector<double> mids;
        for (auto it = solved.begin(); std::next(it) != solved.end(); ++it) {
            auto next = std::next(it);
            if (next->first - it->first <= options.min_gap) continue;
            if (signature(it->second) != signature(next->second)) mids.push_back(0.5 * (it->first + next->first));
        }
        if (mids.empty()) break;
        run(mids);
    }
    std::vector<std::optional<Design>> out;
    for (auto& [value, design] : solved) out.push_back(std::move(design));
    return out;
}

}  // namespace

ParetoFront make_front(std::vector<Design> designs, FrontAxes axes, const BuildingParams& params,
                       std::string fingerprint) {
    ParetoFront front;
    front.axes = axes;
    front.params = params;
    front.scenario_fingerprint = std::move(fingerprint);

    std::vector<Design> unique;
    for (auto& d : designs)
        if (std::none_of(unique.begin(), unique.end(), [&](const Design& u) { return same_design(u, d); }))
            unique.push_back(std::move(d));

    std::vector<std::pair<double, double>> coords;
    for (const auto& d : unique) coords.push_back(coordinates(d, axes));
    auto kept = nondominated_indices(coords);
    for (std::size_t i : kept) {
        FrontPoint p;
        p.design = unique[i];
        p.x = axes == FrontAxes::CostVsEe ? unique[i].cost : floor_area(unique[i]);
        p.y = unique[i].ee;
        for (std::size_t j = 0; j < unique.size(); ++j)
            if (j != i && coords[j] == coords[i]) p.alternatives.push_back(unique[j]);
        front.points.push_back(std::move(p));
    }
    std::stable_sort(front.points.begin(), front.points.end(),
                     [](const FrontPoint& a, const FrontPoint& b) { return a.x < b.x; });
    return front;
}

ParetoFront epsilon_constraint_front(const MinlpEngine& engine, double budget_lo, double budget_hi, int steps,
                                     const SweepOptions& options) {
    if (steps < 2) throw std::invalid_argument("epsilon_constraint_front: steps must be at least 2");
    if (!(budget_lo <= budget_hi)) throw std::invalid_argument("epsilon_constraint_front: budget_lo > budget_hi");
    int instances = 0;
    auto results = adaptive_sweep(
        engine, budget_lo, budget_hi, steps, options,
        [](double b) {
            MinlpQuery q;
            q.budget = b;
            return q;
        },
        instances);
    std::vector<Design> designs;
    for (auto& d : results)
        if (d) designs.push_back(std::move(*d));
    auto front = make_front(std::move(designs), FrontAxes::CostVsEe, engine.scenario().params,
                            engine.scenario().fingerprint());
    front.instances_solved = instances;
    return front;
}

ParetoFront floor_area_front(const MinlpEngine& engine, double fixed_budget, double area_lo, double area_hi,
                             int steps, const SweepOptions& options) {
    if (steps < 2) throw std::invalid_argument("floor_area_front: steps must be at least 2");
    if (!(area_lo <= area_hi)) throw std::invalid_argument("floor_area_front: area_lo > area_hi");
    const auto& profiles = engine.profiles();
    const auto& scenario = engine.scenario();

    // Largest floor area each assignment reaches within the budget.
    std::vector<double> reach(profiles.size(), -std::numeric_limits<double>::infinity());
    parallel_for(profiles.size(), engine.workers(), [&](std::size_t i) {
        const auto& prof = profiles[i];
        if (!prof.feasible || prof.min_cost > fixed_budget * (1.0 + scenario.solver.tolerance)) return;
        ContinuousProblem problem;
        problem.params = scenario.params;
        problem.assign = prof.assign;
        problem.objective = Objective::MaxFloorArea;
        problem.side.push_back({SideConstraint::Kind::CostAtMost, fixed_budget});
        const ContinuousPoint warm[] = {prof.min_cost_point};
        auto report = solve_continuous(problem, scenario.solver, warm);
        if (report.ok()) reach[i] = report.objective_value;
    });
    const double tol = scenario.solver.tolerance;

    int instances = 0;
    auto results = adaptive_sweep(
        engine, area_lo, area_hi, steps, options,
        [&](double area) {
            MinlpQuery q;
            q.budget = fixed_budget;
            q.area_min = area;
            q.admissible = [&reach, area, tol](std::size_t i) { return reach[i] >= area * (1.0 - tol); };
            return q;
        },
        instances);
    std::vector<Design> designs;
    for (auto& d : results)
        if (d) designs.push_back(std::move(*d));
    auto front = make_front(std::move(designs), FrontAxes::AreaVsEe, scenario.params, scenario.fingerprint());
    front.instances_solved = instances;
    return front;
}

namespace {

MaterialSpec* slot(DiscreteAssignment& a, ComponentClass c) {
    switch (c) {
        case ComponentClass::Wall: return &a.wall;
        case ComponentClass::Foundation: return &a.foundation;
        case ComponentClass::Roof: return &a.roof;
        case ComponentClass::RoofCover: return &a.cover;
    }
    return nullptr;
}

const MaterialSpec* slot(const DiscreteAssignment& a, ComponentClass c) {
    return slot(const_cast<DiscreteAssignment&>(a), c);
}

}  // namespace

ParetoFront price_shift(const ParetoFront& front, const std::string& material, double new_price,
                        std::optional<ComponentClass> component) {
    std::vector<Design> designs;
    for (const auto& p : front.points) {
        auto shift = [&](Design d) {
            for (auto c : kAllClasses) {
                if (component && *component != c) continue;
                MaterialSpec* m = slot(d.assign, c);
                if (m->name != material) continue;
                d.cost += component_volume(d.state, c) * (new_price - m->unit_cost);
                m->unit_cost = new_price;
            }
            return d;
        };
        designs.push_back(shift(p.design));
        for (const auto& alt : p.alternatives) designs.push_back(shift(alt));
    }
    auto out = make_front(std::move(designs), front.axes, front.params, front.scenario_fingerprint);
    out.instances_solved = front.instances_solved;
    return out;
}

double price_threshold(const Design& design, double budget, const std::string& material) {
    double volume = 0.0;
    std::optional<double> price;
    for (auto c : kAllClasses) {
        const MaterialSpec* m = slot(design.assign, c);
        if (m->name != material) continue;
        volume += component_volume(design.state, c);
        if (!price) price = m->unit_cost;
    }
    if (!price || !(volume > 0.0)) throw std::invalid_argument("design does not use material " + material);
    return *price + (budget - design.cost) / volume;
}

std::vector<DesignCluster> cluster_designs(const ParetoFront& front) {
    std::map<std::pair<std::string, int>, DesignCluster> groups;
    auto widen = [](std::pair<double, double>& r, double v, bool first) {
        if (first) r = {v, v};
        else r = {std::min(r.first, v), std::max(r.second, v)};
    };
    for (const auto& p : front.points) {
        const auto& d = p.design;
        auto key = std::pair{d.assign.material_tuple(), d.assign.n_slc};
        auto& c = groups[key];
        const bool first = c.members == 0;
        c.material_tuple = key.first;
        c.n_slc = key.second;
        widen(c.cost, d.cost, first);
        widen(c.ee, d.ee, first);
        widen(c.w_do, d.point.w_do, first);
        widen(c.l_wi, d.point.l_wi, first);
        widen(c.v_wa_tot, d.state.v_wa_tot, first);
        widen(c.floor_area, d.point.l_x_fl * d.point.l_y_fl, first);
        ++c.members;
    }
    std::vector<DesignCluster> out;
    for (auto& [key, c] : groups) out.push_back(std::move(c));
    std::stable_sort(out.begin(), out.end(),
                     [](const DesignCluster& a, const DesignCluster& b) { return a.cost.first < b.cost.first; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::string label;
        std::size_t n = i;
        do {
            label.insert(label.begin(), static_cast<char>('A' + n % 26));
            n = n / 26;
        } while (n-- > 0);
        out[i].label = label;
    }
    return out;
}

}  // namespace ecomason
