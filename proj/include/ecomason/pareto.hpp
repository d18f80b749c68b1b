#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecomason/enumerator.hpp"

namespace ecomason {

enum class FrontAxes { CostVsEe, AreaVsEe };

struct FrontPoint {
    double x = 0.0;  // cost (USD) or floor area (m^2)
    double y = 0.0;  // EE (GJ)
    Design design;
    std::vector<Design> alternatives;  // equal coordinates, different designs
};

struct ParetoFront {
    FrontAxes axes = FrontAxes::CostVsEe;
    std::vector<FrontPoint> points;
    std::string scenario_fingerprint;
    int instances_solved = 0;  // MINLP queries issued while building the front
    BuildingParams params;     // needed to re-derive designs after price edits
};

// Indices of the nondominated points when both coordinates are minimized.
// Among exact duplicates only the first (by input order) survives.
std::vector<std::size_t> nondominated_indices(const std::vector<std::pair<double, double>>& points);

template <class Payload>
std::vector<std::pair<std::pair<double, double>, Payload>> nondominated_filter(
    const std::vector<std::pair<std::pair<double, double>, Payload>>& points) {
    std::vector<std::pair<double, double>> coords;
    coords.reserve(points.size());
    for (const auto& p : points) coords.push_back(p.first);
    std::vector<std::pair<std::pair<double, double>, Payload>> out;
    for (std::size_t i : nondominated_indices(coords)) out.push_back(points[i]);
    return out;
}

struct SweepOptions {
    // Bisection depth at neighbouring budgets whose designs differ in material tuple.
    int refine_depth = 6;
    double min_gap = 1.0;  // USD or m^2; stop refining below this interval
};

ParetoFront epsilon_constraint_front(const MinlpEngine& engine, double budget_lo, double budget_hi, int steps,
                                     const SweepOptions& options = {});

ParetoFront floor_area_front(const MinlpEngine& engine, double fixed_budget, double area_lo, double area_hi,
                             int steps, const SweepOptions& options = {});

// Builds a front from arbitrary designs on the given axes.
ParetoFront make_front(std::vector<Design> designs, FrontAxes axes, const BuildingParams& params,
                       std::string fingerprint = {});

// Re-prices `material` (optionally only in one class) and shifts affected points; EE is unchanged.
ParetoFront price_shift(const ParetoFront& front, const std::string& material, double new_price,
                        std::optional<ComponentClass> component = std::nullopt);

// Largest unit price of `material` at which `design` still fits in `budget`.
double price_threshold(const Design& design, double budget, const std::string& material);

struct DesignCluster {
    std::string label;
    std::string material_tuple;
    int n_slc = 0;
    std::pair<double, double> cost;  // min, max
    std::pair<double, double> ee;
    std::pair<double, double> w_do;
    std::pair<double, double> l_wi;
    std::pair<double, double> v_wa_tot;
    std::pair<double, double> floor_area;
    std::size_t members = 0;
};

std::vector<DesignCluster> cluster_designs(const ParetoFront& front);

}  // namespace ecomason
