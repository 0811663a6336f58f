#include "subrad/antinorm.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subrad {

namespace {

void require_in_cone(const Vector& z) {
    for (double v : z)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidInputError("antinorm argument must be nonnegative and finite");
}

void validate(const PolytopeAntinorm& a) {
    if (a.vertices.empty()) throw InvalidInputError("antinorm needs at least one vertex");
    for (const Vector& v : a.vertices) {
        if (v.size() != a.dim) throw InvalidInputError("vertex dimension mismatch");
        require_in_cone(v);
        if (norm_1(v) == 0.0) throw InvalidInputError("antinorm vertices must be nonzero");
    }
}

AntinormValue eval_matrix_impl(const PolytopeAntinorm& a, const Matrix& p, bool parallel) {
    validate(a);
    if (p.rows() != a.dim || p.cols() != a.dim)
        throw InvalidInputError("eval_matrix: matrix dimension mismatch");
    if (!p.nonnegative()) throw InvalidInputError("eval_matrix: matrix must be nonnegative");

    const std::size_t count = a.vertices.size();
    std::vector<double> values(count, kInf);
    std::vector<char> failed(count, 0);

#ifdef _OPENMP
    bool use_omp = parallel && count >= 8 && !omp_in_parallel();
#else
    bool use_omp = false;
    (void)parallel;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (use_omp)
#endif
    for (long long ii = 0; ii < static_cast<long long>(count); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        Vector z = p.apply(a.vertices[i]);
        try {
            values[i] = eval_vector(a, z).value;
        } catch (const NumericalError&) {
            failed[i] = 1;
        }
    }

    AntinormValue out;
    bool any_ok = false;
    for (std::size_t i = 0; i < count; ++i) {
        if (failed[i]) {
            ++out.lp_failures;
            continue;
        }
        if (!any_ok || values[i] < out.value) {
            any_ok = true;
            out.value = values[i];
            out.argmin_vertex_index = static_cast<int>(i);
        }
    }
    if (!any_ok) throw NumericalError("eval_matrix: every vertex LP failed");
    out.c_min = out.value == 0.0 ? kInf : (std::isinf(out.value) ? 0.0 : 1.0 / out.value);
    out.candidate = p.apply(a.vertices[static_cast<std::size_t>(out.argmin_vertex_index)]);
    return out;
}

}  // namespace

PolytopeAntinorm identity_antinorm(std::size_t dim, double tol) {
    PolytopeAntinorm a;
    a.dim = dim;
    a.tol = tol;
    for (std::size_t i = 0; i < dim; ++i) {
        Vector e(dim, 0.0);
        e[i] = 1.0;
        a.vertices.push_back(std::move(e));
    }
    return a;
}

PolytopeAntinorm single_vertex_antinorm(Vector v, double tol) {
    PolytopeAntinorm a;
    a.dim = v.size();
    a.tol = tol;
    require_in_cone(v);
    if (norm_1(v) == 0.0) throw InvalidInputError("vertex must be nonzero");
    a.vertices.push_back(std::move(v));
    return a;
}

LpProblem antinorm_lp(const PolytopeAntinorm& a, const Vector& z) {
    const std::size_t d = a.dim;
    const std::size_t p = a.vertices.size();
    LpProblem lp;
    lp.objective.assign(p + 1, 0.0);
    lp.objective[0] = 1.0;  // minimize c0
    lp.ineq_matrix = Matrix(d + 1, p + 1, 0.0);
    lp.ineq_rhs.assign(d + 1, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        lp.ineq_matrix(i, 0) = -z[i];
        for (std::size_t j = 0; j < p; ++j) lp.ineq_matrix(i, j + 1) = a.vertices[j][i];
    }
    for (std::size_t j = 0; j < p; ++j) lp.ineq_matrix(d, j + 1) = -1.0;
    lp.ineq_rhs[d] = -1.0;
    lp.lower_bounds.assign(p + 1, 0.0);
    lp.upper_bounds.assign(p + 1, kInf);
    return lp;
}

AntinormValue eval_vector(const PolytopeAntinorm& a, const Vector& z) {
    validate(a);
    if (z.size() != a.dim) throw InvalidInputError("eval_vector: dimension mismatch");
    require_in_cone(z);

    const LpOutcome res = solve_lp(antinorm_lp(a, z));
    AntinormValue out;
    switch (res.status) {
        case LpStatus::Infeasible:
            out.value = 0.0;
            out.c_min = kInf;
            return out;
        case LpStatus::Unbounded:  // c0 >= 0 keeps the LP bounded; map like c0 = 0
            out.value = kInf;
            out.c_min = 0.0;
            return out;
        case LpStatus::Optimal: {
            const double c0 = res.objective_value;
            if (c0 <= 0.0) {
                out.value = kInf;
                out.c_min = 0.0;
            } else {
                out.value = 1.0 / c0;
                out.c_min = c0;
            }
            return out;
        }
        case LpStatus::NumericalFailure:
        default:
            throw NumericalError("antinorm LP failed", res.iterations);
    }
}

AntinormValue eval_matrix(const PolytopeAntinorm& a, const Matrix& p) {
    return eval_matrix_impl(a, p, true);
}

AntinormValue eval_matrix_serial(const PolytopeAntinorm& a, const Matrix& p) {
    return eval_matrix_impl(a, p, false);
}

double one_antinorm_matrix(const Matrix& a) {
    if (!a.nonnegative()) throw InvalidInputError("1-antinorm requires a nonnegative matrix");
    double best = kInf;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j);
        best = std::min(best, s);
    }
    return best;
}

double p_antinorm_vector(double p, const Vector& x) {
    require_in_cone(x);
    if (p == 0.0 || p > 1.0 || std::isnan(p))
        throw InvalidInputError("p-antinorm requires p <= 1, p != 0");
    if (std::isinf(p)) {
        if (p > 0) throw InvalidInputError("p-antinorm requires p <= 1");
        double m = kInf;
        for (double v : x) m = std::min(m, v);
        return m;
    }
    if (p < 0.0) {
        for (double v : x)
            if (v == 0.0) return 0.0;  // limit convention on the boundary
    }
    double s = 0;
    for (double v : x) s += std::pow(v, p);
    return std::pow(s, 1.0 / p);
}

std::pair<PolytopeAntinorm, bool> try_insert_vertex(const PolytopeAntinorm& a, const Vector& z) {
    require_in_cone(z);
    if (z.size() != a.dim) throw InvalidInputError("try_insert_vertex: dimension mismatch");
    if (norm_1(z) == 0.0) throw InvalidInputError("cannot insert the zero vector");
    double value;
    try {
        value = eval_vector(a, z).value;
    } catch (const NumericalError&) {
        return {a, false};
    }
    if (value <= 1.0 + a.tol) {
        PolytopeAntinorm out = a;
        out.vertices.push_back(z);
        return {out, true};
    }
    return {a, false};
}

PolytopeAntinorm prune(const PolytopeAntinorm& a) {
    validate(a);
    PolytopeAntinorm out = a;
    auto& v = out.vertices;

    while (v.size() > 1) {
        bool removed = false;
        for (std::size_t i = v.size(); i-- > 0;) {
            if (i >= v.size()) continue;
            PolytopeAntinorm rest = out;
            rest.vertices.erase(rest.vertices.begin() + static_cast<std::ptrdiff_t>(i));
            double val;
            try {
                val = eval_vector(rest, v[i]).value;
            } catch (const NumericalError&) {
                continue;  // keep the vertex when the test itself is unreliable
            }
            if (val >= 1.0 + out.tol) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                removed = true;
            }
            if (v.size() <= 1) break;
        }
        if (!removed) break;
    }

    // exact duplicates: compare after normalizing to unit 1-norm
    std::vector<char> dup(v.size(), 0);
    auto normalized = [](const Vector& x) {
        Vector n = x;
        const double s = norm_1(n);
        for (double& e : n) e /= s;
        return n;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (dup[i]) continue;
        const Vector ni = normalized(v[i]);
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (dup[j]) continue;
            const Vector nj = normalized(v[j]);
            bool eq = true;
            for (std::size_t k = 0; k < ni.size() && eq; ++k)
                eq = std::abs(ni[k] - nj[k]) <= 1e-12 * std::max(std::abs(ni[k]), std::abs(nj[k]));
            if (eq) dup[j] = 1;
        }
    }
    std::vector<Vector> kept;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!dup[i]) kept.push_back(std::move(v[i]));
    out.vertices = std::move(kept);
    return out;
}

std::optional<Vector> rescaled_eigenvector(const PolytopeAntinorm& a, const Vector& v,
                                           double theta) {
    if (!(theta > 1.0)) throw InvalidInputError("scaling parameter must exceed 1");
    require_in_cone(v);
    if (norm_1(v) == 0.0) throw InvalidInputError("eigenvector must be nonzero");
    double av;
    try {
        av = eval_vector(a, v).value;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
    if (!(av > 0.0) || std::isinf(av)) return std::nullopt;
    Vector w = v;
    const double f = 1.0 / (av * theta);
    for (double& e : w) e *= f;
    return w;
}

}  // namespace subrad
