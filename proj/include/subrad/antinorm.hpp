#pragma once

#include <optional>
#include <utility>

#include "subrad/core.hpp"
#include "subrad/lp.hpp"

namespace subrad {

/// Polytope antinorm on the nonnegative orthant, defined by the columns of a
/// vertex matrix V: the unit antiball is conv(V) + R_+^d.
struct PolytopeAntinorm {
    std::size_t dim = 0;
    std::vector<Vector> vertices;
    double tol = 1e-9;

    std::size_t vertex_count() const { return vertices.size(); }
};

/// The 1-antinorm: identity columns as vertices.
PolytopeAntinorm identity_antinorm(std::size_t dim, double tol = 1e-9);
PolytopeAntinorm single_vertex_antinorm(Vector v, double tol = 1e-9);

struct AntinormValue {
    double value = 0.0;   // 0, finite, or +inf
    double c_min = kInf;  // LP optimum; value = 1/c_min with the 0/inf conventions
    int argmin_vertex_index = -1;  // matrix evaluation only
    Vector candidate;              // P * v_j for the minimizing vertex j
    long lp_failures = 0;          // vertices skipped because their LP failed
};

/// Gauge of the antiball at z >= 0, via one LP solve.
AntinormValue eval_vector(const PolytopeAntinorm& a, const Vector& z);

/// a(P) = min over vertices of a(P v_i); lowest index wins ties. The vertex
/// LPs are independent and run under OpenMP; results are folded serially so
/// the outcome does not depend on the thread count.
AntinormValue eval_matrix(const PolytopeAntinorm& a, const Matrix& p);

/// Reference implementation of eval_matrix with the parallel loop disabled.
AntinormValue eval_matrix_serial(const PolytopeAntinorm& a, const Matrix& p);

/// Closed-form 1-antinorm of a nonnegative matrix: minimal column sum.
double one_antinorm_matrix(const Matrix& a);

/// p-antinorm of a nonnegative vector, p <= 1, p != 0, or -inf for the min.
double p_antinorm_vector(double p, const Vector& x);

/// Appends z when a(z) <= 1 + tol. Returns the (possibly unchanged) antinorm
/// and whether z was accepted. An LP failure rejects conservatively.
std::pair<PolytopeAntinorm, bool> try_insert_vertex(const PolytopeAntinorm& a, const Vector& z);

/// Removes vertices whose antinorm w.r.t. the remaining set is >= 1 + tol,
/// scanning indices descending and restarting until stable, then drops exact
/// duplicates. Never reduces the vertex matrix rank to one.
PolytopeAntinorm prune(const PolytopeAntinorm& a);

/// v / (theta * a(v)); nullopt when a(v) = 0 (vector invisible to the antinorm).
std::optional<Vector> rescaled_eigenvector(const PolytopeAntinorm& a, const Vector& v,
                                           double theta);

/// The LP behind eval_vector, exposed for tests.
LpProblem antinorm_lp(const PolytopeAntinorm& a, const Vector& z);

}  // namespace subrad
