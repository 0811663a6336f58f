#pragma once

#include <utility>

#include "subrad/lsr.hpp"

namespace subrad {

/// Real balanced polytope norm: the unit ball is absco(V) = {Vc : sum|c_i| <= 1}.
/// The vertex matrix must have full row rank so the norm is finite everywhere.
struct PolytopeNorm {
    std::size_t dim = 0;
    std::vector<Vector> vertices;
    double tol = 1e-9;

    std::size_t vertex_count() const { return vertices.size(); }
};

/// Identity vertices: the 1-norm.
PolytopeNorm identity_norm(std::size_t dim, double tol = 1e-9);

/// min sum|c_i| subject to Vc = z, solved as an LP after splitting c into
/// nonnegative parts. Throws NumericalError when the LP fails (e.g. a vertex
/// set that lost full rank).
double polytope_norm_vector(const PolytopeNorm& nrm, const Vector& z);

/// Induced norm: max over vertices of ||A v_i||, with the argmax image as the
/// refinement candidate; lowest index wins ties.
std::pair<double, Vector> polytope_norm_matrix(const PolytopeNorm& nrm, const Matrix& a);

struct JsrConfig {
    double delta = 1e-6;
    long max_evals = 1000;
    double tol = 1e-9;
    std::vector<Vector> init_vertices;  // adaptive runs; empty means the 1-norm
};

struct JsrReport {
    double lower = 0.0;
    double upper = kInf;
    SolverMetrics metrics;  // l_slp tracks the degree of the best lower bound
    std::vector<std::vector<int>> slp_candidates;  // s.m.p. candidate words
    std::vector<Vector> final_vertices;
    long lp_failures = 0;
    Termination terminated_by = Termination::Budget;
};

/// Classic Gripenberg bounds with a fixed norm: the order-dual of the LSR
/// loop (min/max swapped, antinorm replaced by norm, inequalities reversed).
JsrReport gripenberg_jsr(const MatrixFamily& f, const JsrConfig& cfg, const PolytopeNorm& norm);

/// Adaptive variant: candidate vertices with norm >= 1 - tol are incorporated
/// (they enlarge the unit ball, so the norm only decreases pointwise) and the
/// vertex set is pruned dually at the end of each degree.
JsrReport adaptive_gripenberg_jsr(const MatrixFamily& f, const JsrConfig& cfg);

/// Maximizers of rho(P)^(1/l_slp): s.m.p. candidates, canonical per cyclic class.
std::vector<std::vector<int>> identify_smp_candidates(const MatrixFamily& f,
                                                      const JsrReport& report,
                                                      long enum_cap = 1L << 20);

}  // namespace subrad
