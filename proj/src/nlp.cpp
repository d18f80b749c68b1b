#include "ecomason/nlp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace ecomason {

namespace {

constexpr int kMaxDims = kContinuousDims + 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) { return fnv1a(h, s.data(), s.size()); }

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

constexpr int kPrimes[kMaxDims] = {2, 3, 5, 7, 11, 13, 17, 19};

// The problem in unit-cube coordinates u in [0,1]^d.
class ScaledProblem {
public:
    ScaledProblem(const ContinuousProblem& problem) : problem_(problem), params_(problem.params) {
        Box box = continuous_bounds(problem.params, problem.assign);
        dims_ = kContinuousDims;
        for (int j = 0; j < kContinuousDims; ++j) {
            lo_[j] = box.lo[j];
            hi_[j] = box.hi[j];
        }
        if (problem.objective == Objective::MinFoundationWidth) {
            dims_ = kMaxDims;
            lo_[7] = 2.0 * problem.assign.foundation.min_thickness.value_or(0.0);
            hi_[7] = std::max(lo_[7], problem.foundation_width_max);
            hi_[4] = 0.5 * hi_[7];
        }
        for (int j = 0; j < dims_; ++j) hi_[j] = std::max(hi_[j], lo_[j]);
        residuals_.entries.reserve(48);

        std::array<double, kMaxDims> mid{};
        for (int j = 0; j < dims_; ++j) mid[j] = 0.5;
        Sample s = sample(mid.data());
        switch (problem.objective) {
            case Objective::MinEmbodiedEnergy:
            case Objective::MinCost: objective_scale_ = std::max(std::abs(s.raw_objective), 1.0); break;
            case Objective::MaxFloorArea: objective_scale_ = std::max(problem.params.A_fl_min, 1.0); break;
            default: objective_scale_ = 1.0; break;
        }
    }

    int dims() const { return dims_; }
    double lo(int j) const { return lo_[j]; }
    double hi(int j) const { return hi_[j]; }

    ContinuousPoint to_point(const double* u) const {
        double x[kContinuousDims];
        for (int j = 0; j < kContinuousDims; ++j) x[j] = lo_[j] + u[j] * (hi_[j] - lo_[j]);
        return ContinuousPoint::from_array(x);
    }
    double width(const double* u) const {
        return dims_ == kMaxDims ? lo_[7] + u[7] * (hi_[7] - lo_[7]) : problem_.params.B_fo;
    }
    void to_unit(const ContinuousPoint& p, double foundation_width, double* u) const {
        auto x = p.to_array();
        for (int j = 0; j < kContinuousDims; ++j) u[j] = unit(j, x[j]);
        if (dims_ == kMaxDims) u[7] = unit(7, foundation_width);
    }

    struct Sample {
        double raw_objective = 0.0;
        double objective = 0.0;  // scaled
        std::vector<double> g;   // normalized residuals
        bool finite = true;
    };

    Sample sample(const double* u) {
        Sample s;
        ContinuousPoint p = to_point(u);
        params_.B_fo = width(u);
        DerivedState state = derive_state(params_, problem_.assign, p);
        constraint_residuals(params_, problem_.assign, state, residuals_);
        double c = NAN, ee = NAN;
        auto need_cost = [&] {
            if (std::isnan(c)) c = cost(params_, problem_.assign, state);
            return c;
        };
        auto need_ee = [&] {
            if (std::isnan(ee)) ee = embodied_energy(params_, problem_.assign, state);
            return ee;
        };
        for (const auto& sc : problem_.side) {
            const double scale = std::max(std::abs(sc.bound), 1.0);
            switch (sc.kind) {
                case SideConstraint::Kind::CostAtMost:
                    residuals_.entries.push_back({"side_cost", ConstraintGroup::Side, need_cost() - sc.bound, scale});
                    break;
                case SideConstraint::Kind::EmbodiedEnergyAtMost:
                    residuals_.entries.push_back({"side_ee", ConstraintGroup::Side, need_ee() - sc.bound, scale});
                    break;
                case SideConstraint::Kind::FloorAreaAtLeast:
                    residuals_.entries.push_back(
                        {"side_floor_area", ConstraintGroup::Side, sc.bound - p.l_x_fl * p.l_y_fl, scale});
                    break;
            }
        }
        switch (problem_.objective) {
            case Objective::MinEmbodiedEnergy: s.raw_objective = need_ee(); break;
            case Objective::MinCost: s.raw_objective = need_cost(); break;
            case Objective::MaxFloorArea: s.raw_objective = -p.l_x_fl * p.l_y_fl; break;
            case Objective::MinFoundationWidth: s.raw_objective = params_.B_fo; break;
            case Objective::Feasibility: s.raw_objective = 0.0; break;
        }
        s.objective = s.raw_objective / objective_scale_;
        s.g.resize(residuals_.entries.size());
        for (std::size_t i = 0; i < s.g.size(); ++i) {
            s.g[i] = residuals_.entries[i].normalized();
            if (!std::isfinite(s.g[i])) s.finite = false;
        }
        if (!std::isfinite(s.objective)) s.finite = false;
        return s;
    }

private:
    double unit(int j, double x) const {
        const double w = hi_[j] - lo_[j];
        return w > 0.0 ? std::clamp((x - lo_[j]) / w, 0.0, 1.0) : 0.0;
    }

    const ContinuousProblem& problem_;
    BuildingParams params_;
    int dims_ = kContinuousDims;
    std::array<double, kMaxDims> lo_{}, hi_{};
    double objective_scale_ = 1.0;
    ResidualVector residuals_;
};

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

double violation(const std::vector<double>& g) {
    double v = 0.0;
    for (double gi : g) v = std::max(v, gi);
    return v;
}

double penalty_value(const ScaledProblem::Sample& s, double mu) {
    double acc = 0.0;
    for (double gi : s.g)
        if (gi > 0.0) acc += gi * gi;
    return s.objective + mu * acc;
}

struct Linearization {
    ScaledProblem::Sample center;
    Vec grad_f;
    Mat jac;  // rows: residuals
    bool finite = true;
};

Linearization linearize(ScaledProblem& sp, const Vec& u) {
    constexpr double h = 1e-7;
    const int d = sp.dims();
    Linearization lin;
    lin.center = sp.sample(u.data());
    lin.finite = lin.center.finite;
    const auto m = static_cast<Eigen::Index>(lin.center.g.size());
    lin.grad_f = Vec::Zero(d);
    lin.jac = Mat::Zero(m, d);
    Vec up = u;
    for (int j = 0; j < d; ++j) {
        up[j] = u[j] + h;
        auto plus = sp.sample(up.data());
        up[j] = u[j] - h;
        auto minus = sp.sample(up.data());
        up[j] = u[j];
        double span = 2.0 * h;
        if (!plus.finite) {
            plus = lin.center;
            span = h;
        }
        if (!minus.finite) {
            minus = lin.center;
            span = plus.finite ? h : 0.0;
        }
        if (span == 0.0 || !plus.finite || !minus.finite) {
            lin.finite = false;
            continue;
        }
        lin.grad_f[j] = (plus.objective - minus.objective) / span;
        for (Eigen::Index i = 0; i < m; ++i) lin.jac(i, j) = (plus.g[i] - minus.g[i]) / span;
    }
    return lin;
}

Vec penalty_gradient(const Linearization& lin, double mu) {
    Vec grad = lin.grad_f;
    for (Eigen::Index i = 0; i < lin.jac.rows(); ++i) {
        const double gi = lin.center.g[i];
        if (gi > 0.0) grad += 2.0 * mu * gi * lin.jac.row(i).transpose();
    }
    return grad;
}

Vec clamp_unit(const Vec& u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

struct StageResult {
    Vec u;
    bool converged = false;
    bool numeric_failure = false;
    Mat bfgs;  // curvature of the objective part, carried across stages
};

// Projected quasi-Newton descent on the penalty function. The model Hessian is a BFGS
// estimate of the smooth part plus the exact Gauss-Newton term of the active penalties.
StageResult minimize_stage(ScaledProblem& sp, Vec u, double mu, const SolverConfig& config, Mat bfgs) {
    const int d = sp.dims();
    StageResult out;
    Linearization lin = linearize(sp, u);
    if (!lin.finite) {
        out.u = u;
        out.numeric_failure = true;
        out.bfgs = bfgs;
        return out;
    }
    double value = penalty_value(lin.center, mu);
    for (int it = 0; it < config.max_iterations; ++it) {
        Vec grad = penalty_gradient(lin, mu);
        Vec projected = u - clamp_unit(u - grad);
        if (projected.lpNorm<Eigen::Infinity>() < 1e-11) {
            out.converged = true;
            break;
        }
        const double eps = std::min(1e-3, projected.norm());
        std::array<bool, kMaxDims> free{};
        int n_free = 0;
        for (int j = 0; j < d; ++j) {
            const bool at_lo = u[j] <= eps && grad[j] > 0.0;
            const bool at_hi = u[j] >= 1.0 - eps && grad[j] < 0.0;
            free[j] = !(at_lo || at_hi);
            n_free += free[j];
        }
        Mat H = bfgs;
        for (Eigen::Index i = 0; i < lin.jac.rows(); ++i)
            if (lin.center.g[i] > 0.0) H += 2.0 * mu * lin.jac.row(i).transpose() * lin.jac.row(i);

        Vec dir = Vec::Zero(d);
        if (n_free > 0) {
            Mat Hf(n_free, n_free);
            Vec gf(n_free);
            std::array<int, kMaxDims> idx{};
            for (int j = 0, k = 0; j < d; ++j)
                if (free[j]) idx[k++] = j;
            for (int a = 0; a < n_free; ++a) {
                gf[a] = grad[idx[a]];
                for (int b = 0; b < n_free; ++b) Hf(a, b) = H(idx[a], idx[b]);
            }
            Eigen::LDLT<Mat> ldlt(Hf);
            Vec df = ldlt.solve(-gf);
            if (ldlt.info() != Eigen::Success || !df.allFinite() || df.dot(gf) >= 0.0) df = -gf;
            for (int a = 0; a < n_free; ++a) dir[idx[a]] = df[a];
        }
        for (int j = 0; j < d; ++j)
            if (!free[j]) dir[j] = -grad[j] * eps;  // small projected-gradient move for bound variables

        double alpha = 1.0;
        bool accepted = false;
        Vec u_new;
        ScaledProblem::Sample s_new;
        for (int ls = 0; ls < 40; ++ls) {
            u_new = clamp_unit(u + alpha * dir);
            s_new = sp.sample(u_new.data());
            if (s_new.finite) {
                const double v_new = penalty_value(s_new, mu);
                const double decrease = grad.dot(u_new - u);
                if (v_new <= value + 1e-4 * decrease && v_new <= value) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            out.converged = true;  // no further decrease at working precision
            break;
        }
        Linearization lin_new = linearize(sp, u_new);
        if (!lin_new.finite) {
            out.numeric_failure = true;
            break;
        }
        // Lagrangian gradient change with multipliers frozen at the new point.
        Vec s = u_new - u;
        Vec y = lin_new.grad_f - lin.grad_f;
        for (Eigen::Index i = 0; i < lin_new.jac.rows(); ++i) {
            const double gi = lin_new.center.g[i];
            if (gi > 0.0) y += 2.0 * mu * gi * (lin_new.jac.row(i) - lin.jac.row(i)).transpose();
        }
        const double sBs = s.dot(bfgs * s);
        if (sBs > 1e-300) {
            // Powell damping keeps the estimate positive definite.
            double sy = s.dot(y);
            double theta = 1.0;
            if (sy < 0.2 * sBs) theta = 0.8 * sBs / (sBs - sy);
            Vec r = theta * y + (1.0 - theta) * (bfgs * s);
            Vec Bs = bfgs * s;
            bfgs += r * r.transpose() / s.dot(r) - Bs * Bs.transpose() / sBs;
        }
        const double new_value = penalty_value(lin_new.center, mu);
        const double change = value - new_value;
        u = u_new;
        lin = std::move(lin_new);
        value = new_value;
        if (change <= 1e-15 * std::max(1.0, std::abs(value)) && s.lpNorm<Eigen::Infinity>() < 1e-10) {
            out.converged = true;
            break;
        }
    }
    out.u = u;
    out.bfgs = bfgs;
    return out;
}

// Gauss-Newton steps onto the violated constraints, projected back into the box.
Vec polish(ScaledProblem& sp, Vec u, double tol) {
    for (int it = 0; it < 30; ++it) {
        Linearization lin = linearize(sp, u);
        if (!lin.finite) break;
        const auto& g = lin.center.g;
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] > 0.01 * tol) rows.push_back(static_cast<Eigen::Index>(i));
        if (rows.empty()) break;
        // Keep nearly active constraints from being pushed over.
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] <= 0.01 * tol && g[i] > -0.01 * tol) rows.push_back(static_cast<Eigen::Index>(i));
        Mat A(static_cast<Eigen::Index>(rows.size()), sp.dims());
        Vec b(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            A.row(static_cast<Eigen::Index>(k)) = lin.jac.row(rows[k]);
            b[static_cast<Eigen::Index>(k)] = -(g[rows[k]] + 0.1 * tol);
        }
        Vec step = A.completeOrthogonalDecomposition().solve(b);
        if (!step.allFinite()) break;
        Vec next = clamp_unit(u + step);
        auto s = sp.sample(next.data());
        if (!s.finite || violation(s.g) >= violation(g)) {
            // Fall back to a shorter step before giving up.
            next = clamp_unit(u + 0.5 * step);
            s = sp.sample(next.data());
            if (!s.finite || violation(s.g) >= violation(g)) break;
        }
        u = next;
    }
    return u;
}

struct StartOutcome {
    Vec u;
    double objective = kInf;
    double max_residual = kInf;
    bool feasible = false;
    bool converged = false;
    bool numeric_failure = false;
    std::vector<PenaltyStage> trace;
};

StartOutcome run_start(ScaledProblem& sp, Vec u, const SolverConfig& config) {
    StartOutcome out;
    const int d = sp.dims();
    Mat bfgs = Mat::Identity(d, d);
    double mu = config.penalty_initial;
    bool converged = false;
    for (;;) {
        StageResult stage = minimize_stage(sp, u, mu, config, bfgs);
        if (stage.numeric_failure && stage.u.size() == 0) {
            out.numeric_failure = true;
            return out;
        }
        u = stage.u;
        bfgs = stage.bfgs;
        converged = stage.converged;
        auto s = sp.sample(u.data());
        if (!s.finite) {
            out.numeric_failure = true;
            out.u = u;
            return out;
        }
        const double v = violation(s.g);
        out.trace.push_back({mu, v});
        if (v <= 0.1 * config.tolerance || mu >= config.penalty_max) break;
        mu *= config.penalty_growth;
    }
    u = polish(sp, u, config.tolerance);
    auto s = sp.sample(u.data());
    out.u = u;
    out.numeric_failure = !s.finite;
    out.max_residual = s.finite ? violation(s.g) : kInf;
    out.feasible = s.finite && out.max_residual <= config.tolerance;
    out.objective = s.raw_objective;
    out.converged = converged;
    return out;
}

// Lexicographic preference: lower objective, then wider door, then wider window.
bool better(double obj_a, const ContinuousPoint& a, double obj_b, const ContinuousPoint& b) {
    const double tie = 1e-9 * std::max({1.0, std::abs(obj_a), std::abs(obj_b)});
    if (obj_a < obj_b - tie) return true;
    if (obj_a > obj_b + tie) return false;
    if (a.w_do != b.w_do) return a.w_do > b.w_do;
    return a.l_wi > b.l_wi;
}

double report_objective(const ContinuousProblem& problem, double raw) {
    return problem.objective == Objective::MaxFloorArea ? -raw : raw;
}

}  // namespace

std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::MinEmbodiedEnergy: return "min_EE";
        case Objective::MinCost: return "min_cost";
        case Objective::MaxFloorArea: return "max_floor_area";
        case Objective::MinFoundationWidth: return "min_B_fo";
        case Objective::Feasibility: return "feasibility";
    }
    return "min_EE";
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::OptimalLocal: return "optimal_local";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NumericFailure: return "numeric_failure";
    }
    return "infeasible";
}

std::uint64_t problem_seed(const ContinuousProblem& problem, std::uint64_t base_seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, &base_seed, sizeof base_seed);
    h = fnv1a(h, problem.assign.key());
    h = fnv1a(h, to_string(problem.objective));
    for (const auto& sc : problem.side) {
        auto kind = static_cast<int>(sc.kind);
        h = fnv1a(h, &kind, sizeof kind);
        h = fnv1a(h, &sc.bound, sizeof sc.bound);
    }
    return h;
}

Evaluation evaluate(const ContinuousProblem& problem, const ContinuousPoint& point, double foundation_width) {
    Evaluation ev;
    evaluate(problem, point, foundation_width, ev);
    return ev;
}

void evaluate(const ContinuousProblem& problem, const ContinuousPoint& point, double foundation_width,
              Evaluation& ev) {
    BuildingParams params = problem.params;
    params.B_fo = foundation_width;
    ev.state = derive_state(params, problem.assign, point);
    constraint_residuals(params, problem.assign, ev.state, ev.residuals);
    ev.cost = cost(params, problem.assign, ev.state);
    ev.ee = embodied_energy(params, problem.assign, ev.state);
    for (const auto& sc : problem.side) {
        const double scale = std::max(std::abs(sc.bound), 1.0);
        switch (sc.kind) {
            case SideConstraint::Kind::CostAtMost:
                ev.residuals.entries.push_back({"side_cost", ConstraintGroup::Side, ev.cost - sc.bound, scale});
                break;
            case SideConstraint::Kind::EmbodiedEnergyAtMost:
                ev.residuals.entries.push_back({"side_ee", ConstraintGroup::Side, ev.ee - sc.bound, scale});
                break;
            case SideConstraint::Kind::FloorAreaAtLeast:
                ev.residuals.entries.push_back(
                    {"side_floor_area", ConstraintGroup::Side, sc.bound - point.l_x_fl * point.l_y_fl, scale});
                break;
        }
    }
    switch (problem.objective) {
        case Objective::MinEmbodiedEnergy: ev.objective = ev.ee; break;
        case Objective::MinCost: ev.objective = ev.cost; break;
        case Objective::MaxFloorArea: ev.objective = point.l_x_fl * point.l_y_fl; break;
        case Objective::MinFoundationWidth: ev.objective = foundation_width; break;
        case Objective::Feasibility: ev.objective = std::max(0.0, ev.residuals.max_normalized()); break;
    }
}

SolveReport solve_continuous(const ContinuousProblem& problem, const SolverConfig& config,
                             std::span<const ContinuousPoint> warm_starts) {
    SolveReport report;
    report.seed = problem_seed(problem, config.seed);
    if (config.starts < 1) throw std::invalid_argument("solve_continuous: starts must be at least 1");

    ScaledProblem sp(problem);
    const int d = sp.dims();
    std::mt19937_64 rng(report.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::array<double, kMaxDims> shift{};
    for (int j = 0; j < d; ++j) shift[j] = unif(rng);

    std::vector<Vec> starts;
    for (const auto& w : warm_starts) {
        Vec u(d);
        sp.to_unit(w, problem.params.B_fo, u.data());
        starts.push_back(u);
    }
    for (int k = 0; k < config.starts; ++k) {
        Vec u(d);
        for (int j = 0; j < d; ++j) u[j] = std::fmod(halton(static_cast<std::uint64_t>(k) + 1, kPrimes[j]) + shift[j], 1.0);
        starts.push_back(u);
    }

    bool have = false;
    bool any_numeric_failure = false;
    double best_min_residual = kInf;
    StartOutcome best;
    ContinuousPoint best_point;
    for (const auto& u0 : starts) {
        StartOutcome out = run_start(sp, u0, config);
        ++report.starts_used;
        any_numeric_failure |= out.numeric_failure;
        if (!out.feasible) {
            if (!have && out.max_residual < best_min_residual) {
                best_min_residual = out.max_residual;
                report.point = sp.to_point(out.u.data());
                report.foundation_width = sp.width(out.u.data());
                report.max_residual = out.max_residual;
                report.trace = out.trace;
            }
            continue;
        }
        ContinuousPoint p = sp.to_point(out.u.data());
        if (!have || better(out.objective, p, best.objective, best_point)) {
            best = std::move(out);
            best_point = p;
            have = true;
        }
        if (have && problem.objective == Objective::Feasibility) break;
    }

    if (!have) {
        report.status = any_numeric_failure && !std::isfinite(best_min_residual) ? SolveStatus::NumericFailure
                                                                                : SolveStatus::Infeasible;
        report.objective_value = kInf;
        return report;
    }
    report.point = best_point;
    report.foundation_width = sp.width(best.u.data());
    report.objective_value = report_objective(problem, best.objective);
    report.max_residual = best.max_residual;
    report.trace = std::move(best.trace);
    report.status = best.converged ? SolveStatus::OptimalLocal : SolveStatus::Feasible;
    if (problem.objective == Objective::Feasibility) report.objective_value = report.max_residual;
    return report;
}

SolveReport grid_oracle(const ContinuousProblem& problem, const GridOptions& options) {
    if (options.resolution < 1) throw std::invalid_argument("grid_oracle: resolution must be at least 1");
    constexpr double tol = 1e-6;
    const bool width_dim = problem.objective == Objective::MinFoundationWidth;
    const int r = options.resolution;

    const auto& p = problem.params;
    const auto& a = problem.assign;
    const Box box = continuous_bounds(p, a);
    const double B_lo = width_dim ? 2.0 * a.foundation.min_thickness.value_or(0.0) : p.B_fo;
    const double B_hi = width_dim ? std::max(B_lo, problem.foundation_width_max) : p.B_fo;

    double area_min = p.A_fl_min;
    for (const auto& sc : problem.side)
        if (sc.kind == SideConstraint::Kind::FloorAreaAtLeast) area_min = std::max(area_min, sc.bound);
    const double roof_lo = a.n_slc * p.w_be;
    const double roof_hi = (a.n_slc - 1.0) * p.s_be_max + a.n_slc * p.w_be;
    const bool propagate = options.propagate_bounds;

    // Interval for one axis given the coordinates fixed by the enclosing loops.
    // Each bound is either a box bound or an exact consequence of a linear or monomial constraint.
    using Interval = std::pair<double, double>;
    auto t_wa_range = [&]() -> Interval {
        double lo = box.lo[0], hi = box.hi[0];
        if (!propagate) return {lo, hi};
        lo = std::max(lo, a.n_re * p.d_re + (a.n_re - 1) * p.s_re_min);
        double ly_fl_lo = std::max(box.lo[3], area_min / box.hi[2]);
        if (a.x_wa) ly_fl_lo = std::max(ly_fl_lo, std::sqrt(area_min));
        hi = std::min(hi, 0.5 * (roof_hi - ly_fl_lo));
        return {lo, hi};
    };
    auto l_y_range = [&](double t) -> Interval {
        double lo = box.lo[3], hi = box.hi[3];
        if (!propagate) return {lo, hi};
        lo = std::max({lo, area_min / box.hi[2], roof_lo - 2.0 * t});
        if (a.x_wa) lo = std::max(lo, std::sqrt(area_min));
        hi = std::min(hi, roof_hi - 2.0 * t);
        return {lo, hi};
    };
    auto l_x_range = [&](double ly) -> Interval {
        double lo = box.lo[2], hi = box.hi[2];
        if (!propagate) return {lo, hi};
        lo = std::max(lo, area_min / ly);
        if (a.x_wa) hi = std::min(hi, ly);
        else lo = std::max(lo, ly);
        return {lo, hi};
    };
    auto t_fo_range = [&](double t, double B) -> Interval {
        double lo = box.lo[4], hi = std::max(box.lo[4], 0.5 * B);
        if (!propagate) return {lo, width_dim ? hi : box.hi[4]};
        // e = (B - 2 t_fo - t_wa) / 2 within [0, B/6] or [B/6, B/3].
        const double e_lo = a.x_e ? B / 6.0 : 0.0;
        const double e_hi = a.x_e ? B / 3.0 : B / 6.0;
        lo = std::max(lo, 0.5 * (B - t - 2.0 * e_hi));
        hi = std::min(hi, 0.5 * (B - t - 2.0 * e_lo));
        return {lo, hi};
    };
    auto opening_range = [&](int dim, double longer, double h) -> Interval {
        double lo = box.lo[dim], hi = box.hi[dim];
        if (!propagate) return {lo, hi};
        hi = std::min(hi, 0.5 * longer);
        if (dim == 6) hi = std::min(hi, 0.5 * h);
        return {lo, hi};
    };

    // Unit coordinates per level: B, t_wa, l_y, l_x, t_fo, h_wa, w_do, l_wi.
    constexpr int kLevels = 8;
    std::array<double, kLevels> u_lo{}, u_hi{};
    u_hi.fill(1.0);
    auto at = [&](const Interval& iv, int level, int k) {
        double u = r == 1 ? 0.5 * (u_lo[level] + u_hi[level])
                          : u_lo[level] + (u_hi[level] - u_lo[level]) * k / (r - 1);
        return iv.first + u * (iv.second - iv.first);
    };
    auto level_steps = [&](int level) { return level == 0 && !width_dim ? 1 : r; };
    auto unit_of = [](const Interval& iv, double v) {
        return iv.second > iv.first ? (v - iv.first) / (iv.second - iv.first) : 0.0;
    };

    SolveReport report;
    report.status = SolveStatus::Infeasible;
    report.objective_value = kInf;
    bool have = false;
    double best_raw = kInf;
    std::array<double, kMaxDims> best_x{};
    std::array<double, kLevels> best_u{};

    auto empty = [&](const Interval& iv) { return iv.first > iv.second + tol * std::max(1.0, std::abs(iv.second)); };
    auto clamp = [](Interval iv) {
        if (iv.first > iv.second) iv.second = iv.first;
        return iv;
    };

    Evaluation ev;
    auto scan = [&] {
        std::array<double, kMaxDims> x{};
        std::array<double, kLevels> u{};
        const Interval B_iv{B_lo, B_hi};
        const Interval t_iv = t_wa_range();
        if (empty(t_iv)) return;
        for (int kb = 0; kb < level_steps(0); ++kb) {
            const double B = width_dim ? at(B_iv, 0, kb) : p.B_fo;
            u[0] = unit_of(B_iv, B);
            x[7] = B;
            for (int k0 = 0; k0 < r; ++k0) {
                x[0] = at(clamp(t_iv), 1, k0);
                u[1] = unit_of(t_iv, x[0]);
                const Interval y_iv = l_y_range(x[0]);
                if (empty(y_iv)) continue;
                for (int k3 = 0; k3 < r; ++k3) {
                    x[3] = at(clamp(y_iv), 2, k3);
                    u[2] = unit_of(y_iv, x[3]);
                    const Interval x_iv = l_x_range(x[3]);
                    if (empty(x_iv)) continue;
                    for (int k2 = 0; k2 < r; ++k2) {
                        x[2] = at(clamp(x_iv), 3, k2);
                        u[3] = unit_of(x_iv, x[2]);
                        const double longer = std::max(x[2], x[3]) + 2.0 * x[0];
                        const Interval fo_iv = t_fo_range(x[0], B);
                        if (empty(fo_iv)) continue;
                        for (int k4 = 0; k4 < r; ++k4) {
                            x[4] = at(clamp(fo_iv), 4, k4);
                            u[4] = unit_of(fo_iv, x[4]);
                            const Interval h_iv{box.lo[1], box.hi[1]};
                            for (int k1 = 0; k1 < r; ++k1) {
                                x[1] = at(h_iv, 5, k1);
                                u[5] = unit_of(h_iv, x[1]);
                                const Interval do_iv = opening_range(5, longer, x[1]);
                                if (empty(do_iv)) continue;
                                for (int k5 = 0; k5 < r; ++k5) {
                                    x[5] = at(clamp(do_iv), 6, k5);
                                    u[6] = unit_of(do_iv, x[5]);
                                    const Interval wi_iv = opening_range(6, longer, x[1]);
                                    if (empty(wi_iv)) continue;
                                    for (int k6 = 0; k6 < r; ++k6) {
                                        x[6] = at(clamp(wi_iv), 7, k6);
                                        u[7] = unit_of(wi_iv, x[6]);
                                        const ContinuousPoint pt = ContinuousPoint::from_array(x.data());
                                        evaluate(problem, pt, B, ev);
                                        if (!is_feasible(ev.residuals, tol)) continue;
                                        const double raw = problem.objective == Objective::MaxFloorArea
                                                               ? -ev.objective
                                                               : ev.objective;
                                        const ContinuousPoint best_pt = ContinuousPoint::from_array(best_x.data());
                                        if (!have || better(raw, pt, best_raw, best_pt)) {
                                            have = true;
                                            best_raw = raw;
                                            best_x = x;
                                            best_u = u;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    };

    scan();
    if (have && r > 1) {
        std::array<double, kLevels> step{};
        step.fill(1.0 / (r - 1));
        for (int pass = 0; pass < options.refinement_passes; ++pass) {
            for (int l = 0; l < kLevels; ++l) {
                u_lo[l] = std::max(0.0, best_u[l] - step[l]);
                u_hi[l] = std::min(1.0, best_u[l] + step[l]);
                step[l] = (u_hi[l] - u_lo[l]) / (r - 1);
            }
            scan();
        }
    }
    report.starts_used = 0;
    if (!have) return report;
    report.point = ContinuousPoint::from_array(best_x.data());
    report.foundation_width = width_dim ? best_x[7] : p.B_fo;
    evaluate(problem, report.point, report.foundation_width, ev);
    report.max_residual = std::max(0.0, ev.residuals.max_normalized());
    report.objective_value = problem.objective == Objective::MaxFloorArea ? -best_raw : best_raw;
    if (problem.objective == Objective::Feasibility) report.objective_value = report.max_residual;
    report.status = SolveStatus::Feasible;
    return report;
}

bool feasibility_probe(const BuildingParams& params, const DiscreteAssignment& assign, const SolverConfig& config) {
    if (structurally_infeasible(params, assign)) return false;
    ContinuousProblem problem;
    problem.params = params;
    problem.assign = assign;
    problem.objective = Objective::Feasibility;
    return solve_continuous(problem, config).ok();
}

}  // namespace ecomason
