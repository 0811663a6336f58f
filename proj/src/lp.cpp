#include "subrad/lp.hpp"

#include <algorithm>
#include <cmath>

namespace subrad {

namespace {

enum class VarStatus { Basic, AtLower, AtUpper, FreeAtZero, Fixed };

struct Simplex {
    // variable layout: [0, n) structural, [n, n+r) slacks, [n+r, n+2r) artificials
    std::size_t n = 0, r = 0, nv = 0;
    Matrix a;               // row-scaled constraint matrix
    Vector b;               // row-scaled rhs
    Vector lb, ub;          // per variable
    Vector cost;            // current phase cost
    std::vector<VarStatus> status;
    std::vector<std::size_t> basis;      // size r, variable index per row
    std::vector<std::size_t> basis_pos;  // nv entries, row of a basic var or npos
    std::vector<double> binv;            // r x r dense basis inverse
    Vector xb;                           // basic variable values
    Vector nbval;                        // values of nonbasic variables
    long iterations = 0;
    long degenerate_streak = 0;
    bool bland = false;
    double feas_tol;
    long max_iter;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    static constexpr double kPivTol = 1e-10;

    double col_entry(std::size_t var, std::size_t row) const {
        if (var < n) return a(row, var);
        if (var < n + r) return (var - n == row) ? 1.0 : 0.0;
        return (var - n - r == row) ? art_sign[var - n - r] : 0.0;
    }

    std::vector<double> art_sign;

    void column(std::size_t var, Vector& out) const {
        if (var < n) {
            for (std::size_t i = 0; i < r; ++i) out[i] = a(i, var);
        } else {
            std::fill(out.begin(), out.end(), 0.0);
            if (var < n + r)
                out[var - n] = 1.0;
            else
                out[var - n - r] = art_sign[var - n - r];
        }
    }

    void ftran(const Vector& col, Vector& out) const {
        for (std::size_t i = 0; i < r; ++i) {
            double s = 0;
            const double* row = binv.data() + i * r;
            for (std::size_t k = 0; k < r; ++k) s += row[k] * col[k];
            out[i] = s;
        }
    }

    // y = costᵀ_B · B⁻¹
    void duals(Vector& y) const {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            const double* row = binv.data() + i * r;
            for (std::size_t k = 0; k < r; ++k) y[k] += cb * row[k];
        }
    }

    double reduced_cost(std::size_t var, const Vector& y) const {
        double d = cost[var];
        if (var < n) {
            for (std::size_t i = 0; i < r; ++i) d -= y[i] * a(i, var);
        } else if (var < n + r) {
            d -= y[var - n];
        } else {
            d -= y[var - n - r] * art_sign[var - n - r];
        }
        return d;
    }

    // rebuild binv and xb from scratch
    bool refactor() {
        std::vector<double> m(r * r, 0.0);
        Vector col(r);
        for (std::size_t j = 0; j < r; ++j) {
            column(basis[j], col);
            for (std::size_t i = 0; i < r; ++i) m[i * r + j] = col[i];
        }
        std::vector<double> inv(r * r, 0.0);
        for (std::size_t i = 0; i < r; ++i) inv[i * r + i] = 1.0;
        for (std::size_t k = 0; k < r; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < r; ++i)
                if (std::abs(m[i * r + k]) > std::abs(m[p * r + k])) p = i;
            if (std::abs(m[p * r + k]) < 1e-14) return false;
            if (p != k)
                for (std::size_t j = 0; j < r; ++j) {
                    std::swap(m[k * r + j], m[p * r + j]);
                    std::swap(inv[k * r + j], inv[p * r + j]);
                }
            const double piv = m[k * r + k];
            for (std::size_t j = 0; j < r; ++j) {
                m[k * r + j] /= piv;
                inv[k * r + j] /= piv;
            }
            for (std::size_t i = 0; i < r; ++i) {
                if (i == k) continue;
                const double f = m[i * r + k];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < r; ++j) {
                    m[i * r + j] -= f * m[k * r + j];
                    inv[i * r + j] -= f * inv[k * r + j];
                }
            }
        }
        binv = std::move(inv);
        recompute_xb();
        return true;
    }

    void recompute_xb() {
        Vector rhs = b;
        for (std::size_t v = 0; v < nv; ++v) {
            if (status[v] == VarStatus::Basic) continue;
            const double val = nbval[v];
            if (val == 0.0) continue;
            if (v < n) {
                for (std::size_t i = 0; i < r; ++i) rhs[i] -= a(i, v) * val;
            } else if (v < n + r) {
                rhs[v - n] -= val;
            } else {
                rhs[v - n - r] -= art_sign[v - n - r] * val;
            }
        }
        ftran(rhs, xb);
    }

    enum class StepResult { Optimal, Pivoted, Unbounded, IterLimit, Singular };

    StepResult step() {
        if (iterations >= max_iter) return StepResult::IterLimit;
        Vector y(r);
        duals(y);
        const double dual_tol = 1e-9;

        std::size_t enter = npos;
        int direction = 0;
        double best = dual_tol;
        for (std::size_t v = 0; v < nv; ++v) {
            const VarStatus st = status[v];
            if (st == VarStatus::Basic || st == VarStatus::Fixed) continue;
            const double d = reduced_cost(v, y);
            int dir = 0;
            double score = 0;
            if (st == VarStatus::AtLower && d < -dual_tol) {
                dir = +1;
                score = -d;
            } else if (st == VarStatus::AtUpper && d > dual_tol) {
                dir = -1;
                score = d;
            } else if (st == VarStatus::FreeAtZero && std::abs(d) > dual_tol) {
                dir = d < 0 ? +1 : -1;
                score = std::abs(d);
            }
            if (dir == 0) continue;
            if (bland) {
                enter = v;
                direction = dir;
                break;
            }
            if (score > best) {
                best = score;
                enter = v;
                direction = dir;
            }
        }
        if (enter == npos) return StepResult::Optimal;

        Vector col(r), w(r);
        column(enter, col);
        ftran(col, w);

        // ratio test: x_B moves by -direction * theta * w
        double theta = kInf;
        std::size_t leave_row = npos;
        int leave_to = 0;  // -1 lower, +1 upper
        const double own_range = ub[enter] - lb[enter];
        if (std::isfinite(own_range)) theta = own_range;

        for (std::size_t i = 0; i < r; ++i) {
            const double delta = -direction * w[i];
            const std::size_t bv = basis[i];
            if (delta < -kPivTol) {
                const double room = xb[i] - lb[bv];
                const double t = std::max(0.0, room) / (-delta);
                if (t < theta - 1e-13 ||
                    (t < theta + 1e-13 && (leave_row == npos || bv < basis[leave_row]))) {
                    theta = t;
                    leave_row = i;
                    leave_to = -1;
                }
            } else if (delta > kPivTol && std::isfinite(ub[bv])) {
                const double room = ub[bv] - xb[i];
                const double t = std::max(0.0, room) / delta;
                if (t < theta - 1e-13 ||
                    (t < theta + 1e-13 && (leave_row == npos || bv < basis[leave_row]))) {
                    theta = t;
                    leave_row = i;
                    leave_to = +1;
                }
            }
        }

        if (!std::isfinite(theta)) return StepResult::Unbounded;
        ++iterations;
        if (theta <= 1e-12)
            ++degenerate_streak;
        else
            degenerate_streak = 0;
        if (!bland && degenerate_streak > 3 * static_cast<long>(nv)) bland = true;

        if (leave_row == npos) {
            // bound flip, no basis change
            for (std::size_t i = 0; i < r; ++i) xb[i] -= direction * theta * w[i];
            nbval[enter] = (direction > 0) ? ub[enter] : lb[enter];
            status[enter] = (direction > 0) ? VarStatus::AtUpper : VarStatus::AtLower;
            return StepResult::Pivoted;
        }

        const double piv = w[leave_row];
        if (std::abs(piv) < kPivTol) return StepResult::Singular;

        for (std::size_t i = 0; i < r; ++i) xb[i] -= direction * theta * w[i];
        const double enter_start =
            (status[enter] == VarStatus::AtLower) ? lb[enter]
            : (status[enter] == VarStatus::AtUpper) ? ub[enter] : 0.0;

        const std::size_t leaving = basis[leave_row];
        status[leaving] = (leave_to < 0) ? VarStatus::AtLower : VarStatus::AtUpper;
        nbval[leaving] = (leave_to < 0) ? lb[leaving] : ub[leaving];
        if (!std::isfinite(nbval[leaving])) nbval[leaving] = 0.0;
        basis_pos[leaving] = npos;

        basis[leave_row] = enter;
        basis_pos[enter] = leave_row;
        status[enter] = VarStatus::Basic;
        xb[leave_row] = enter_start + direction * theta;

        // binv <- E⁻¹ binv with the pivot column w
        double* prow = binv.data() + leave_row * r;
        for (std::size_t k = 0; k < r; ++k) prow[k] /= piv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == leave_row) continue;
            const double f = w[i];
            if (f == 0.0) continue;
            double* row = binv.data() + i * r;
            for (std::size_t k = 0; k < r; ++k) row[k] -= f * prow[k];
        }
        if (iterations % 64 == 0) {
            if (!refactor()) return StepResult::Singular;
        }
        return StepResult::Pivoted;
    }
};

}  // namespace

LpOutcome solve_lp(const LpProblem& p, const LpOptions& opts) {
    const std::size_t n = p.objective.size();
    const std::size_t r = p.ineq_rhs.size();
    if (p.ineq_matrix.rows() != r || (r > 0 && p.ineq_matrix.cols() != n) ||
        p.lower_bounds.size() != n || p.upper_bounds.size() != n)
        throw InvalidInputError("solve_lp: inconsistent problem dimensions");
    for (std::size_t j = 0; j < n; ++j)
        if (p.lower_bounds[j] > p.upper_bounds[j])
            throw InvalidInputError("solve_lp: lower bound exceeds upper bound");

    LpOutcome out;
    if (n == 0) {
        out.status = LpStatus::Optimal;
        out.objective_value = 0;
        return out;
    }

    Simplex s;
    s.n = n;
    s.r = r;
    s.nv = n + 2 * r;
    s.feas_tol = opts.feas_tol;
    s.max_iter = opts.max_iter > 0 ? opts.max_iter
                                   : std::max<long>(300, static_cast<long>(n + r));

    // row equilibration: scaling a row of Ax <= b leaves the feasible set unchanged
    s.a = p.ineq_matrix;
    s.b = p.ineq_rhs;
    Vector row_scale(r, 1.0);
    for (std::size_t i = 0; i < r; ++i) {
        double m = 0;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(s.a(i, j)));
        if (m > 0) {
            row_scale[i] = m;
            for (std::size_t j = 0; j < n; ++j) s.a(i, j) /= m;
            s.b[i] /= m;
        }
    }

    s.lb.assign(s.nv, 0.0);
    s.ub.assign(s.nv, kInf);
    for (std::size_t j = 0; j < n; ++j) {
        s.lb[j] = p.lower_bounds[j];
        s.ub[j] = p.upper_bounds[j];
    }
    s.status.assign(s.nv, VarStatus::AtLower);
    s.nbval.assign(s.nv, 0.0);
    s.basis_pos.assign(s.nv, Simplex::npos);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(s.lb[j])) {
            s.status[j] = VarStatus::AtLower;
            s.nbval[j] = s.lb[j];
        } else if (std::isfinite(s.ub[j])) {
            s.status[j] = VarStatus::AtUpper;
            s.nbval[j] = s.ub[j];
        } else {
            s.status[j] = VarStatus::FreeAtZero;
            s.nbval[j] = 0.0;
        }
    }

    // residual decides slack vs artificial start basis per row
    Vector resid = s.b;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = s.nbval[j];
        if (v == 0.0) continue;
        for (std::size_t i = 0; i < r; ++i) resid[i] -= s.a(i, j) * v;
    }
    s.art_sign.assign(r, 1.0);
    s.basis.assign(r, 0);
    s.binv.assign(r * r, 0.0);
    s.xb.assign(r, 0.0);
    bool need_phase1 = false;
    for (std::size_t i = 0; i < r; ++i) {
        if (resid[i] >= 0.0) {
            s.basis[i] = n + i;  // slack
            s.status[n + i] = VarStatus::Basic;
            s.basis_pos[n + i] = i;
            s.status[n + r + i] = VarStatus::Fixed;  // artificial unused
            s.xb[i] = resid[i];
            s.binv[i * r + i] = 1.0;
        } else {
            s.art_sign[i] = -1.0;
            s.basis[i] = n + r + i;
            s.status[n + r + i] = VarStatus::Basic;
            s.basis_pos[n + r + i] = i;
            s.xb[i] = -resid[i];
            s.binv[i * r + i] = -1.0;
            need_phase1 = true;
        }
    }

    auto run = [&]() -> Simplex::StepResult {
        while (true) {
            const auto res = s.step();
            if (res == Simplex::StepResult::Pivoted) continue;
            if (res == Simplex::StepResult::Singular) {
                if (s.refactor()) continue;
                return Simplex::StepResult::Singular;
            }
            return res;
        }
    };

    if (need_phase1) {
        s.cost.assign(s.nv, 0.0);
        for (std::size_t i = 0; i < r; ++i)
            if (s.art_sign[i] < 0) s.cost[n + r + i] = 1.0;
        const auto res = run();
        out.iterations = s.iterations;
        if (res == Simplex::StepResult::IterLimit || res == Simplex::StepResult::Singular) {
            out.status = LpStatus::NumericalFailure;
            return out;
        }
        double infeas = 0;
        for (std::size_t i = 0; i < r; ++i)
            if (s.basis[i] >= n + r) infeas += std::max(0.0, s.xb[i]);
        if (infeas > 1e3 * opts.feas_tol) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // lock artificials to zero for phase 2
        for (std::size_t i = 0; i < r; ++i) {
            const std::size_t av = n + r + i;
            s.lb[av] = s.ub[av] = 0.0;
            if (s.status[av] != VarStatus::Basic) s.status[av] = VarStatus::Fixed;
            s.nbval[av] = 0.0;
        }
        s.bland = false;
        s.degenerate_streak = 0;
    }

    s.cost.assign(s.nv, 0.0);
    for (std::size_t j = 0; j < n; ++j) s.cost[j] = p.objective[j];
    const auto res = run();
    out.iterations = s.iterations;
    if (res == Simplex::StepResult::Unbounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }
    if (res != Simplex::StepResult::Optimal) {
        out.status = LpStatus::NumericalFailure;
        return out;
    }

    Vector x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        if (s.status[j] != VarStatus::Basic) x[j] = s.nbval[j];
    for (std::size_t i = 0; i < r; ++i)
        if (s.basis[i] < n) x[s.basis[i]] = s.xb[i];

    // final feasibility audit in the original row scaling
    const double ftol = std::max(opts.feas_tol * 1e3, 1e-8);
    for (std::size_t i = 0; i < r; ++i) {
        double ax = 0;
        for (std::size_t j = 0; j < n; ++j) ax += p.ineq_matrix(i, j) * x[j];
        const double slack = p.ineq_rhs[i] - ax;
        if (slack < -ftol * std::max(1.0, row_scale[i])) {
            out.status = LpStatus::NumericalFailure;
            return out;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (x[j] < p.lower_bounds[j] - ftol || x[j] > p.upper_bounds[j] + ftol) {
            out.status = LpStatus::NumericalFailure;
            return out;
        }
    }

    double obj = 0;
    for (std::size_t j = 0; j < n; ++j) obj += p.objective[j] * x[j];
    out.status = LpStatus::Optimal;
    out.solution = std::move(x);
    out.objective_value = obj;
    return out;
}

}  // namespace subrad
