#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecomason/nlp.hpp"

namespace ecomason {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioRule {
    enum class Kind { LinkBrickGrades, FixMaterial };
    Kind kind = Kind::LinkBrickGrades;
    ComponentClass component = ComponentClass::Wall;  // FixMaterial only
    std::string material;                              // FixMaterial only

    static ScenarioRule link_brick_grades() { return {}; }
    static ScenarioRule fix_wall_material(std::string name) {
        return {Kind::FixMaterial, ComponentClass::Wall, std::move(name)};
    }
    static ScenarioRule fix_material(ComponentClass c, std::string name) {
        return {Kind::FixMaterial, c, std::move(name)};
    }
    bool operator==(const ScenarioRule&) const = default;
};

enum class ScenarioObjective { MinEmbodiedEnergy, MinCost };

struct ScenarioConfig {
    std::string catalog_path;  // empty means the bundled catalog
    std::set<std::string> exclude_materials;
    std::map<std::string, double> param_overrides;
    std::vector<ScenarioRule> rules;
    SolverConfig solver;
    ScenarioObjective objective = ScenarioObjective::MinEmbodiedEnergy;
    bool exhaustive_rebar = false;
    // Used instead of catalog_path when set.
    std::optional<MaterialCatalog> catalog_override;

    // Resolved by finalize().
    MaterialCatalog catalog;
    BuildingParams params;

    // Loads the catalog, filters availability, applies overrides and checks rules.
    void finalize();
    // Hex digest of the resolved scenario content.
    std::string fingerprint() const;
};

std::string default_catalog_path();
// Case-study defaults: bundled catalog, brick grade linkage.
ScenarioConfig default_scenario();

// JSON tree with sections catalog_path, exclude_materials, param_overrides, rules, solver, objective.
// Relative catalog paths resolve against base_dir.
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = "");
ScenarioConfig load_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& scenario);

bool satisfies_rules(const std::vector<ScenarioRule>& rules, const DiscreteAssignment& assign);
std::vector<DiscreteAssignment> enumerate_discrete(const ScenarioConfig& scenario);

struct Provenance {
    std::uint64_t seed = 0;
    int starts = 0;
    std::string solver_version;
};

inline constexpr const char* kSolverVersion = "ecomason-penalty-qn/1";

struct Design {
    DiscreteAssignment assign;
    ContinuousPoint point;
    DerivedState state;
    double cost = 0.0;  // USD
    double ee = 0.0;    // GJ
    Provenance provenance;
};

Design make_design(const BuildingParams& params, const DiscreteAssignment& assign, const ContinuousPoint& point,
                   Provenance provenance = {});

// Cached per-assignment solutions without cost, area or energy caps.
struct AssignmentProfile {
    DiscreteAssignment assign;
    bool feasible = false;
    double min_cost = 0.0;  // USD
    ContinuousPoint min_cost_point;
    double min_ee = 0.0;  // MJ
    double min_ee_cost = 0.0;
    ContinuousPoint min_ee_point;
    double max_ee = 0.0;  // EE at the min-cost point, MJ
    ObjectiveBounds bounds;
    SolveReport min_cost_report;
    SolveReport min_ee_report;
};

struct MinlpQuery {
    std::optional<double> budget;     // USD
    std::optional<double> area_min;   // m^2
    std::optional<double> ee_cap;     // MJ, min-cost scenarios
    // Extra admissibility test on profile indices (e.g. a reachable-area table).
    std::function<bool(std::size_t)> admissible;
};

struct MinlpResult {
    std::optional<Design> design;
    int subproblems = 0;  // continuous solves dispatched for this query
    // Populated when no design exists.
    std::string diagnostic;
};

int default_worker_count();

// Enumerates and solves the per-assignment profiles once, then answers budgeted queries.
class MinlpEngine {
public:
    // Assignments whose cost lower bound exceeds cost_cap are pruned before any solve.
    explicit MinlpEngine(ScenarioConfig scenario, int workers = default_worker_count(),
                         std::optional<double> cost_cap = std::nullopt);

    const ScenarioConfig& scenario() const { return scenario_; }
    const std::vector<AssignmentProfile>& profiles() const { return profiles_; }
    std::size_t enumerated() const { return enumerated_; }
    std::size_t pruned() const { return pruned_; }
    int workers() const { return workers_; }

    MinlpResult solve(const MinlpQuery& query) const;

    // Same profiles restricted to a smaller material set; no re-solve.
    MinlpEngine restricted(const std::set<std::string>& excluded) const;

private:
    MinlpEngine() = default;
    void build_profiles(const std::vector<DiscreteAssignment>& candidates);
    void sort_profiles();
    std::string diagnose(const MinlpQuery& query) const;

    ScenarioConfig scenario_;
    int workers_ = 1;
    std::size_t enumerated_ = 0;
    std::size_t pruned_ = 0;
    std::vector<AssignmentProfile> profiles_;  // feasible and infeasible, sorted by key
    std::vector<std::size_t> order_;           // feasible profiles by lower bound
};

std::optional<Design> solve_minlp(const ScenarioConfig& scenario, std::optional<double> budget);

// Smallest B_fo (to 0.005 m) at which some design with this wall is feasible; nullopt if none up to 2 m.
std::optional<double> min_feasible_foundation_width(const ScenarioConfig& scenario, const std::string& wall_material,
                                                    int workers = default_worker_count());

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace ecomason
