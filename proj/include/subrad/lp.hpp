#pragma once

#include "subrad/core.hpp"

namespace subrad {

/// min fᵀx  s.t.  Ax <= b,  lb <= x <= ub  (entries of lb/ub may be ±inf).
/// There are deliberately no equality rows; callers encode them as paired
/// inequalities.
struct LpProblem {
    Vector objective;    // f, size n
    Matrix ineq_matrix;  // A, r x n
    Vector ineq_rhs;     // b, size r
    Vector lower_bounds; // size n
    Vector upper_bounds; // size n
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct LpOptions {
    double feas_tol = 1e-10;
    long max_iter = 0; // 0 means max(300, number of variables + rows)
};

struct LpOutcome {
    LpStatus status = LpStatus::NumericalFailure;
    Vector solution;             // structural variables, Optimal only
    double objective_value = 0;  // Optimal only
    long iterations = 0;
};

/// Bounded-variable revised simplex, two phases, Bland's rule after 3n
/// degenerate pivots. Deterministic: Dantzig pricing with lowest-index ties.
LpOutcome solve_lp(const LpProblem& p, const LpOptions& opts = {});

}  // namespace subrad
