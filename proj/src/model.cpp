#include "ecomason/model.hpp"

#include <algorithm>
#include <cmath>

namespace ecomason {

std::string DiscreteAssignment::key() const {
    return wall.name + "|" + foundation.name + "|" + roof.name + "|" + cover.name + "|" + std::to_string(n_slc) +
           "|" + std::to_string(n_re) + "|" + (x_e ? "1" : "0") + "|" + (x_wa ? "1" : "0");
}

std::string DiscreteAssignment::material_tuple() const {
    return wall.name + "/" + foundation.name + "/" + roof.name + "/" + cover.name;
}

DerivedState derive_state(const BuildingParams& p, const DiscreteAssignment& a, const ContinuousPoint& x) {
    DerivedState s;
    s.point = x;
    s.B_fo = p.B_fo;
    const double t = x.t_wa;
    const double h = x.h_wa;
    const double n = p.n_rm;

    s.l_x_wa = x.l_x_fl + 2.0 * t;
    s.l_y_wa = x.l_y_fl + 2.0 * t;
    s.A_wa_x = t * s.l_x_wa;
    s.A_wa_y = t * s.l_y_wa;
    s.S_x = t * s.l_x_wa * s.l_x_wa / 6.0;
    s.S_y = t * s.l_y_wa * s.l_y_wa / 6.0;
    s.v_wa = t * (2.0 * h * (x.l_y_fl + s.l_x_wa) - (x.w_do * p.h_do + x.l_wi * x.l_wi));
    s.v_wa_tot = n * s.v_wa - (n - 1.0) * t * h * s.l_x_wa;

    s.l_re = a.n_re * 2.0 * (x.w_do + p.h_do) + 4.0 * x.l_wi;
    s.l_re_tot = n * s.l_re;

    const double half = 0.5 * s.l_x_wa;
    s.v_slc = p.A_be * s.l_x_wa + 2.0 * p.A_ra * std::hypot(p.R_be * half, half);
    s.v_slc_tot = n * a.n_slc * s.v_slc;
    s.v_co_tot = p.R_co * s.v_slc_tot;
    s.q_ro = a.n_slc * s.v_slc * (a.roof.density + p.R_co * a.cover.density);

    s.P_D_wa = p.g * t * h * a.wall.density;
    s.F_D_x_wa = s.P_D_wa * s.l_x_wa + 0.5 * p.g * s.q_ro;
    s.F_L_x_wa = 0.5 * p.P_L * s.l_x_wa * t;
    s.F_w_x = 0.5 * p.C_f * s.l_y_wa * h * p.P_design;
    s.F_w_y = 0.5 * p.C_f * s.l_x_wa * h * p.P_design;
    s.M_w_x = s.F_w_x * h;
    s.M_w_y = s.F_w_y * h;
    s.F_1 = p.g * p.seismic_coefficient() * s.v_wa * a.wall.density;
    s.F_e = 0.5 * s.F_1;
    s.M_e_x = s.F_e * h;

    s.A_fo = p.B_fo * p.h_fo - 2.0 * x.t_fo * (p.h_fo - x.t_fo);
    s.P_D_fo = p.g * s.A_fo * a.foundation.density;
    s.F_D_x_fo = s.P_D_fo * s.l_x_wa + s.F_D_x_wa;
    s.v_fo_tot = (2.0 * n * (s.l_y_wa - 2.0 * x.t_fo) + (n + 1.0) * s.l_x_wa) * s.A_fo;
    s.e = 0.5 * (p.B_fo - 2.0 * x.t_fo - x.t_wa);

    s.inconsistent = s.v_wa < 0.0 || s.v_wa_tot < 0.0 || s.A_fo < 0.0 || s.v_fo_tot < 0.0;
    return s;
}

std::string_view to_string(ConstraintGroup g) {
    switch (g) {
        case ConstraintGroup::Roof: return "roof";
        case ConstraintGroup::FloorArea: return "floor_area";
        case ConstraintGroup::WallStressX: return "wall_stress_x";
        case ConstraintGroup::WallStressY: return "wall_stress_y";
        case ConstraintGroup::Foundation: return "foundation";
        case ConstraintGroup::Openings: return "openings";
        case ConstraintGroup::VariableBounds: return "variable_bounds";
        case ConstraintGroup::Side: return "side";
    }
    return "roof";
}

double ResidualVector::max_normalized() const {
    double worst_value = -std::numeric_limits<double>::infinity();
    for (const auto& r : entries) {
        double v = r.normalized();
        if (std::isnan(v)) return std::numeric_limits<double>::infinity();
        worst_value = std::max(worst_value, v);
    }
    return worst_value;
}

const Residual* ResidualVector::worst() const {
    const Residual* best = nullptr;
    for (const auto& r : entries)
        if (!best || r.normalized() > best->normalized()) best = &r;
    return best;
}

const Residual* ResidualVector::find(std::string_view id) const {
    for (const auto& r : entries)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

double magnitude(double v) { return std::max(std::abs(v), 1e-9); }

}  // namespace

void constraint_residuals(const BuildingParams& p, const DiscreteAssignment& a, const DerivedState& s,
                          ResidualVector& out) {
    out.entries.clear();
    auto add = [&](std::string_view id, ConstraintGroup g, double lhs, double rhs) {
        out.entries.push_back({id, g, lhs - rhs, magnitude(rhs)});
    };
    auto add_scaled = [&](std::string_view id, ConstraintGroup g, double value, double scale) {
        out.entries.push_back({id, g, value, magnitude(scale)});
    };
    const auto& x = s.point;
    const double n_slc = a.n_slc;
    const double B = s.B_fo;

    add("roof_min_width", ConstraintGroup::Roof, n_slc * p.w_be, s.l_y_wa);
    add("roof_max_spacing", ConstraintGroup::Roof, s.l_y_wa, (n_slc - 1.0) * p.s_be_max + n_slc * p.w_be);

    add_scaled("floor_area", ConstraintGroup::FloorArea, p.A_fl_min - x.l_x_fl * x.l_y_fl, std::max(p.A_fl_min, 1.0));

    const double sigma_c = a.wall.allowable_compressive.value_or(0.0);
    const double sigma_t = p.sigma_t_allw;
    const double tau = p.tau_allw;

    const double axial_x = (s.F_D_x_wa + s.F_L_x_wa) / s.A_wa_x;
    add("wall_x_compression_wind", ConstraintGroup::WallStressX, axial_x + s.M_w_x / s.S_x, sigma_c);
    add("wall_x_compression_seismic", ConstraintGroup::WallStressX, axial_x + s.M_e_x / s.S_x, sigma_c);
    add("wall_x_tension_wind", ConstraintGroup::WallStressX, -axial_x + s.M_w_x / s.S_x, sigma_t);
    add("wall_x_tension_seismic", ConstraintGroup::WallStressX, -axial_x + s.M_e_x / s.S_x, sigma_t);
    add("wall_x_shear_wind", ConstraintGroup::WallStressX, 1.5 * s.F_w_x / s.A_wa_x, tau);
    add("wall_x_shear_seismic", ConstraintGroup::WallStressX, 1.5 * s.F_e / s.A_wa_x, tau);

    const double axial_y = s.P_D_wa / x.t_wa;
    add("wall_y_compression_wind", ConstraintGroup::WallStressY, axial_y + s.M_w_y / s.S_y, sigma_c);
    add("wall_y_compression_seismic", ConstraintGroup::WallStressY, axial_y + s.M_e_x / s.S_y, sigma_c);
    add("wall_y_tension_wind", ConstraintGroup::WallStressY, -axial_y + s.M_w_y / s.S_y, sigma_t);
    add("wall_y_tension_seismic", ConstraintGroup::WallStressY, -axial_y + s.M_e_x / s.S_y, sigma_t);
    add("wall_y_shear_wind", ConstraintGroup::WallStressY, 1.5 * s.F_w_y / s.A_wa_y, tau);
    add("wall_y_shear_seismic", ConstraintGroup::WallStressY, 1.5 * s.F_e / s.A_wa_y, tau);

    const double sixth = B / 6.0;
    if (!a.x_e) {
        add_scaled("foundation_branch_upper", ConstraintGroup::Foundation, s.e - sixth, sixth);
        add_scaled("foundation_branch_lower", ConstraintGroup::Foundation, -s.e, sixth);
        const double k = 1.0 / B + 6.0 * x.t_fo * s.e / (B * B * B);
        add("foundation_shear_x", ConstraintGroup::Foundation, 1.5 / s.l_x_wa * (s.F_D_x_fo + s.F_L_x_wa) * k, tau);
        add("foundation_shear_y", ConstraintGroup::Foundation, 1.5 * (s.P_D_fo + s.P_D_wa) * k, tau);
    } else {
        add_scaled("foundation_branch_lower", ConstraintGroup::Foundation, sixth - s.e, sixth);
        add_scaled("foundation_branch_upper", ConstraintGroup::Foundation, s.e - 2.0 * sixth, sixth);
        const double k = (1.0 + x.t_fo / B) / (B - 2.0 * s.e);
        add("foundation_shear_x", ConstraintGroup::Foundation, k * (s.F_D_x_fo + s.F_L_x_wa) / s.l_x_wa, tau);
        add("foundation_shear_y", ConstraintGroup::Foundation, k * (s.P_D_fo + s.P_D_wa), tau);
    }

    const double longer = a.x_wa ? s.l_y_wa : s.l_x_wa;
    if (a.x_wa)
        add_scaled("openings_orientation", ConstraintGroup::Openings, s.l_x_wa - s.l_y_wa, s.l_y_wa);
    else
        add_scaled("openings_orientation", ConstraintGroup::Openings, s.l_y_wa - s.l_x_wa, s.l_x_wa);
    add("openings_door_width", ConstraintGroup::Openings, x.w_do, 0.5 * longer);
    add("openings_window_width", ConstraintGroup::Openings, x.l_wi, 0.5 * longer);
    add("openings_window_height", ConstraintGroup::Openings, x.l_wi, 0.5 * x.h_wa);
    add("openings_rebar_spacing", ConstraintGroup::Openings, a.n_re * p.d_re + (a.n_re - 1) * p.s_re_min, x.t_wa);
    add_scaled("openings_wall_volume", ConstraintGroup::Openings, -s.v_wa,
               std::max(x.t_wa * 2.0 * x.h_wa * (x.l_y_fl + s.l_x_wa), 1.0));

    const double t_wa_min = a.wall.min_thickness.value_or(0.0);
    const double t_fo_min = a.foundation.min_thickness.value_or(0.0);
    add_scaled("bound_t_wa_min", ConstraintGroup::VariableBounds, t_wa_min - x.t_wa, std::max(t_wa_min, 0.1));
    add("bound_t_wa_max", ConstraintGroup::VariableBounds, x.t_wa, p.t_wa_max);
    add_scaled("bound_h_wa_min", ConstraintGroup::VariableBounds, p.h_wa_min - x.h_wa, p.h_wa_min);
    add("bound_h_wa_max", ConstraintGroup::VariableBounds, x.h_wa, p.h_wa_max);
    add_scaled("bound_l_x_fl_min", ConstraintGroup::VariableBounds, p.l_fl_min - x.l_x_fl, p.l_fl_min);
    add("bound_l_x_fl_max", ConstraintGroup::VariableBounds, x.l_x_fl, p.l_fl_max);
    add_scaled("bound_l_y_fl_min", ConstraintGroup::VariableBounds, p.l_fl_min - x.l_y_fl, p.l_fl_min);
    add("bound_l_y_fl_max", ConstraintGroup::VariableBounds, x.l_y_fl, p.l_fl_max);
    add_scaled("bound_t_fo_min", ConstraintGroup::VariableBounds, t_fo_min - x.t_fo, std::max(t_fo_min, 0.1));
    add("bound_t_fo_half_width", ConstraintGroup::VariableBounds, x.t_fo, 0.5 * B);
    add_scaled("bound_w_do_min", ConstraintGroup::VariableBounds, p.w_do_min - x.w_do, p.w_do_min);
    add_scaled("bound_l_wi_min", ConstraintGroup::VariableBounds, p.l_wi_min - x.l_wi, p.l_wi_min);
}

ResidualVector constraint_residuals(const BuildingParams& params, const DiscreteAssignment& assign,
                                    const DerivedState& state) {
    ResidualVector out;
    out.entries.reserve(40);
    constraint_residuals(params, assign, state, out);
    return out;
}

double cost(const BuildingParams& p, const DiscreteAssignment& a, const DerivedState& s) {
    return s.v_slc_tot * a.roof.unit_cost + s.v_co_tot * a.cover.unit_cost + s.v_wa_tot * a.wall.unit_cost +
           s.v_fo_tot * a.foundation.unit_cost + s.l_re_tot * p.C_re;
}

double embodied_energy(const BuildingParams& p, const DiscreteAssignment& a, const DerivedState& s) {
    return s.v_slc_tot * a.roof.energy_per_m3() + s.v_co_tot * a.cover.energy_per_m3() +
           s.v_wa_tot * a.wall.energy_per_m3() + s.v_fo_tot * a.foundation.energy_per_m3() +
           s.l_re_tot * p.E_re * p.rho_re;
}

bool is_feasible(const ResidualVector& residuals, double tol) {
    for (const auto& r : residuals.entries)
        if (!(r.value <= tol * r.scale)) return false;
    return true;
}

double component_volume(const DerivedState& state, ComponentClass component) {
    switch (component) {
        case ComponentClass::Wall: return state.v_wa_tot;
        case ComponentClass::Foundation: return state.v_fo_tot;
        case ComponentClass::Roof: return state.v_slc_tot;
        case ComponentClass::RoofCover: return state.v_co_tot;
    }
    return 0.0;
}

Box continuous_bounds(const BuildingParams& p, const DiscreteAssignment& a) {
    Box b;
    const double longest = 0.5 * (p.l_fl_max + 2.0 * p.t_wa_max);
    b.lo = {a.wall.min_thickness.value_or(0.0), p.h_wa_min, p.l_fl_min, p.l_fl_min,
            a.foundation.min_thickness.value_or(0.0), p.w_do_min, p.l_wi_min};
    b.hi = {p.t_wa_max,
            p.h_wa_max,
            p.l_fl_max,
            p.l_fl_max,
            0.5 * p.B_fo,
            std::max(p.w_do_min, longest),
            std::max(p.l_wi_min, std::min(0.5 * p.h_wa_max, longest))};
    return b;
}

bool structurally_infeasible(const BuildingParams& p, const DiscreteAssignment& a) {
    const double t_min = a.wall.min_thickness.value_or(0.0);
    const double tf_min = a.foundation.min_thickness.value_or(0.0);
    if (t_min > p.t_wa_max || tf_min > 0.5 * p.B_fo) return true;
    if (a.n_slc < p.n_slc_min || a.n_slc > p.n_slc_max || a.n_re < p.n_re_min) return true;

    // Eccentricity range over the box, with the residual tolerance as slack.
    const double slack = 1e-6 * p.B_fo / 6.0;
    const double e_max = 0.5 * (p.B_fo - 2.0 * tf_min - t_min);
    if (!a.x_e && e_max < -slack) return true;
    if (a.x_e && e_max < p.B_fo / 6.0 - slack) return true;

    // Roof span window against the reachable wall length.
    const double ly_lo = p.l_fl_min + 2.0 * t_min;
    const double ly_hi = p.l_fl_max + 2.0 * p.t_wa_max;
    const double roof_lo = a.n_slc * p.w_be;
    const double roof_hi = (a.n_slc - 1.0) * p.s_be_max + a.n_slc * p.w_be;
    if (roof_lo > ly_hi || roof_hi < ly_lo) return true;

    if (a.n_re * p.d_re + (a.n_re - 1) * p.s_re_min > p.t_wa_max) return true;
    if (p.l_fl_max * p.l_fl_max < p.A_fl_min) return true;
    return false;
}

ObjectiveBounds objective_lower_bounds(const BuildingParams& p, const DiscreteAssignment& a) {
    const double n = p.n_rm;
    const double t_min = a.wall.min_thickness.value_or(0.0);
    const double tf_min = a.foundation.min_thickness.value_or(0.0);
    const double lf_lo = std::max(p.l_fl_min, p.A_fl_min / p.l_fl_max);
    const double lwa_lo = lf_lo + 2.0 * t_min;

    // Walls: the bracket in v_wa_tot / t grows with h; openings taken at their largest.
    const double longest = 0.5 * (p.l_fl_max + 2.0 * p.t_wa_max);
    const double w_do_ub = std::max(p.w_do_min, longest);
    const double l_wi_ub = std::max(p.l_wi_min, std::min(0.5 * p.h_wa_max, longest));
    const double bracket = 2.0 * n * p.h_wa_min * lf_lo + (n + 1.0) * p.h_wa_min * lwa_lo -
                           n * (w_do_ub * p.h_do + l_wi_ub * l_wi_ub);
    const double v_wa = t_min * std::max(0.0, bracket);

    const double half = 0.5 * lwa_lo;
    const double v_slc = p.A_be * lwa_lo + 2.0 * p.A_ra * std::hypot(p.R_be * half, half);
    const double v_slc_tot = n * a.n_slc * v_slc;
    const double v_co = p.R_co * v_slc_tot;

    const double tf_star = std::clamp(0.5 * p.h_fo, tf_min, std::max(tf_min, 0.5 * p.B_fo));
    const double a_fo = std::max(0.0, p.B_fo * p.h_fo - 2.0 * tf_star * (p.h_fo - tf_star));
    const double v_fo =
        (2.0 * n * std::max(0.0, lwa_lo - p.B_fo) + (n + 1.0) * lwa_lo) * a_fo;

    const double l_re = n * (a.n_re * 2.0 * (p.w_do_min + p.h_do) + 4.0 * p.l_wi_min);

    ObjectiveBounds b;
    b.cost = v_slc_tot * a.roof.unit_cost + v_co * a.cover.unit_cost + v_wa * a.wall.unit_cost +
             v_fo * a.foundation.unit_cost + l_re * p.C_re;
    b.ee = v_slc_tot * a.roof.energy_per_m3() + v_co * a.cover.energy_per_m3() + v_wa * a.wall.energy_per_m3() +
           v_fo * a.foundation.energy_per_m3() + l_re * p.E_re * p.rho_re;
    return b;
}

std::array<double, 2> big_m_wall_residuals(const BuildingParams& p, const DiscreteAssignment& a,
                                           const DerivedState& s) {
    // 0 <= l_x_wa - l_y_wa + M x_wa <= M
    const double m = p.big_m_wall();
    const double mid = s.l_x_wa - s.l_y_wa + m * (a.x_wa ? 1.0 : 0.0);
    return {-mid, mid - m};
}

}  // namespace ecomason
