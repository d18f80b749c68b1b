#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ecomason/model.hpp"

namespace ecomason {

enum class Objective { MinEmbodiedEnergy, MinCost, MaxFloorArea, MinFoundationWidth, Feasibility };

std::string_view to_string(Objective o);

struct SideConstraint {
    enum class Kind { CostAtMost, EmbodiedEnergyAtMost, FloorAreaAtLeast };
    Kind kind = Kind::CostAtMost;
    double bound = 0.0;  // USD, MJ or m^2

    bool operator==(const SideConstraint&) const = default;
};

struct ContinuousProblem {
    BuildingParams params;
    DiscreteAssignment assign;
    Objective objective = Objective::MinEmbodiedEnergy;
    std::vector<SideConstraint> side;
    // Search range for B_fo when it is the objective.
    double foundation_width_max = 2.0;
};

struct SolverConfig {
    int starts = 32;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    int max_iterations = 200;  // inner iterations per penalty stage
    double penalty_growth = 10.0;
    double penalty_initial = 10.0;
    double penalty_max = 1e9;

    bool operator==(const SolverConfig&) const = default;
};

enum class SolveStatus { OptimalLocal, Feasible, Infeasible, NumericFailure };

std::string_view to_string(SolveStatus s);

struct PenaltyStage {
    double weight = 0.0;
    double violation = 0.0;  // largest normalized residual, clipped at zero
};

struct SolveReport {
    SolveStatus status = SolveStatus::Infeasible;
    ContinuousPoint point;
    double foundation_width = 0.0;  // B_fo at the point
    double objective_value = 0.0;   // natural units: MJ, USD, m^2, m or max residual
    double max_residual = 0.0;
    int starts_used = 0;
    std::uint64_t seed = 0;
    std::vector<PenaltyStage> trace;  // from the start that produced `point`

    bool ok() const { return status == SolveStatus::OptimalLocal || status == SolveStatus::Feasible; }
};

// Seed mixing the base seed with the assignment, objective and side constraints.
std::uint64_t problem_seed(const ContinuousProblem& problem, std::uint64_t base_seed);

// Evaluation helpers shared by the solver, the oracle and tests.
struct Evaluation {
    DerivedState state;
    ResidualVector residuals;  // model residuals plus side constraints
    double objective = 0.0;
    double cost = 0.0;
    double ee = 0.0;
};
Evaluation evaluate(const ContinuousProblem& problem, const ContinuousPoint& point, double foundation_width);
// Reuses the buffers in `out`.
void evaluate(const ContinuousProblem& problem, const ContinuousPoint& point, double foundation_width,
              Evaluation& out);

SolveReport solve_continuous(const ContinuousProblem& problem, const SolverConfig& config,
                             std::span<const ContinuousPoint> warm_starts = {});

struct GridOptions {
    int resolution = 15;
    int refinement_passes = 1;
    // Grid each axis over the sub-interval left by the roof, floor-area, orientation, eccentricity
    // and opening constraints given the outer coordinates; false grids the plain box.
    bool propagate_bounds = true;
};
// Exhaustive uniform grid plus refinement around the incumbent.
// Resolution 1 evaluates only the midpoint of each axis interval.
SolveReport grid_oracle(const ContinuousProblem& problem, const GridOptions& options);

bool feasibility_probe(const BuildingParams& params, const DiscreteAssignment& assign,
                       const SolverConfig& config = {});

}  // namespace ecomason
