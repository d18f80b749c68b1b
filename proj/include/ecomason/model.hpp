#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "ecomason/material.hpp"
#include "ecomason/params.hpp"

namespace ecomason {

struct DiscreteAssignment {
    MaterialSpec wall;
    MaterialSpec foundation;
    MaterialSpec roof;
    MaterialSpec cover;
    int n_slc = 7;
    int n_re = 2;
    bool x_e = false;   // e >= B_fo / 6 branch
    bool x_wa = false;  // l_y_wa >= l_x_wa branch

    // Stable text key, e.g. "Br2|Br2|Wo|Pl|7|2|0|1".
    std::string key() const;
    // "Br2/Br2/Wo/Pl"
    std::string material_tuple() const;
};

inline constexpr int kContinuousDims = 7;

struct ContinuousPoint {
    double t_wa = 0.0;
    double h_wa = 0.0;
    double l_x_fl = 0.0;
    double l_y_fl = 0.0;
    double t_fo = 0.0;
    double w_do = 0.0;
    double l_wi = 0.0;

    std::array<double, kContinuousDims> to_array() const { return {t_wa, h_wa, l_x_fl, l_y_fl, t_fo, w_do, l_wi}; }
    static ContinuousPoint from_array(const double* x) { return {x[0], x[1], x[2], x[3], x[4], x[5], x[6]}; }
    bool operator==(const ContinuousPoint&) const = default;
};

struct DerivedState {
    ContinuousPoint point;
    double B_fo = 0.0;
    double l_x_wa = 0, l_y_wa = 0;
    double A_wa_x = 0, A_wa_y = 0;
    double S_x = 0, S_y = 0;
    double v_wa = 0, v_wa_tot = 0;
    double l_re = 0, l_re_tot = 0;
    double v_slc = 0, v_slc_tot = 0, v_co_tot = 0;
    double q_ro = 0;
    double P_D_wa = 0;
    double F_D_x_wa = 0, F_L_x_wa = 0;
    double F_w_x = 0, F_w_y = 0;
    double M_w_x = 0, M_w_y = 0;
    double F_1 = 0, F_e = 0, M_e_x = 0;
    double A_fo = 0, P_D_fo = 0, F_D_x_fo = 0, v_fo_tot = 0;
    double e = 0;
    // Set when a volume or section goes negative (openings larger than the wall face).
    bool inconsistent = false;
};

DerivedState derive_state(const BuildingParams& params, const DiscreteAssignment& assign, const ContinuousPoint& point);

enum class ConstraintGroup { Roof, FloorArea, WallStressX, WallStressY, Foundation, Openings, VariableBounds, Side };

std::string_view to_string(ConstraintGroup g);

struct Residual {
    std::string_view id;
    ConstraintGroup group = ConstraintGroup::Roof;
    double value = 0.0;  // <= 0 when satisfied
    double scale = 1.0;  // right-hand magnitude
    double normalized() const { return value / scale; }
};

struct ResidualVector {
    std::vector<Residual> entries;

    double max_normalized() const;
    const Residual* worst() const;
    const Residual* find(std::string_view id) const;
};

ResidualVector constraint_residuals(const BuildingParams& params, const DiscreteAssignment& assign,
                                    const DerivedState& state);
// Allocation-free variant for the solver's inner loop; clears and refills `out`.
void constraint_residuals(const BuildingParams& params, const DiscreteAssignment& assign, const DerivedState& state,
                          ResidualVector& out);

double cost(const BuildingParams& params, const DiscreteAssignment& assign, const DerivedState& state);
// MJ
double embodied_energy(const BuildingParams& params, const DiscreteAssignment& assign, const DerivedState& state);

bool is_feasible(const ResidualVector& residuals, double tol);

// Volume of the material filling `component` in this design (m^3).
double component_volume(const DerivedState& state, ComponentClass component);

struct Box {
    std::array<double, kContinuousDims> lo{};
    std::array<double, kContinuousDims> hi{};
};

// Search box for the seven continuous dimensions. Door and window upper ends come from the
// opening constraints (half the longer wall, half the wall height).
Box continuous_bounds(const BuildingParams& params, const DiscreteAssignment& assign);

// Interval test that never rejects an assignment with a feasible point.
bool structurally_infeasible(const BuildingParams& params, const DiscreteAssignment& assign);

struct ObjectiveBounds {
    double cost = 0.0;  // USD
    double ee = 0.0;    // MJ
};

// Lower bounds on cost and embodied energy over the whole search box.
ObjectiveBounds objective_lower_bounds(const BuildingParams& params, const DiscreteAssignment& assign);

// Big-M form of the wall-orientation indicator, for cross-checking the branch inequalities.
std::array<double, 2> big_m_wall_residuals(const BuildingParams& params, const DiscreteAssignment& assign,
                                           const DerivedState& state);

}  // namespace ecomason
