#include "subrad/jsr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subrad {

namespace {

constexpr double kImproveTol = 1e-12;

void validate(const PolytopeNorm& nrm) {
    if (nrm.vertices.empty()) throw InvalidInputError("norm needs at least one vertex");
    for (const Vector& v : nrm.vertices)
        if (v.size() != nrm.dim) throw InvalidInputError("norm vertex dimension mismatch");
}

std::size_t numeric_rank(const std::vector<Vector>& cols, std::size_t dim) {
    std::vector<Vector> m = cols;
    std::size_t rank = 0;
    double scale = 0;
    for (const Vector& c : m) scale = std::max(scale, norm_inf(c));
    if (scale == 0) return 0;
    for (std::size_t row = 0; row < dim && rank < m.size(); ++row) {
        std::size_t piv = rank;
        for (std::size_t j = rank + 1; j < m.size(); ++j)
            if (std::abs(m[j][row]) > std::abs(m[piv][row])) piv = j;
        if (std::abs(m[piv][row]) <= 1e-12 * scale) continue;
        std::swap(m[rank], m[piv]);
        for (std::size_t j = rank + 1; j < m.size(); ++j) {
            const double f = m[j][row] / m[rank][row];
            if (f == 0.0) continue;
            for (std::size_t i = row; i < dim; ++i) m[j][i] -= f * m[rank][i];
        }
        ++rank;
    }
    return rank;
}

std::pair<double, Vector> norm_matrix_impl(const PolytopeNorm& nrm, const Matrix& a,
                                           bool parallel) {
    validate(nrm);
    if (a.rows() != nrm.dim || a.cols() != nrm.dim)
        throw InvalidInputError("polytope_norm_matrix: dimension mismatch");

    const std::size_t count = nrm.vertices.size();
    std::vector<double> values(count, -1.0);
    std::vector<char> failed(count, 0);

#ifdef _OPENMP
    const bool use_omp = parallel && count >= 8 && !omp_in_parallel();
#pragma omp parallel for schedule(dynamic) if (use_omp)
#else
    (void)parallel;
#endif
    for (long long ii = 0; ii < static_cast<long long>(count); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        try {
            values[i] = polytope_norm_vector(nrm, a.apply(nrm.vertices[i]));
        } catch (const NumericalError&) {
            failed[i] = 1;
        }
    }

    int arg = -1;
    double best = -kInf;
    for (std::size_t i = 0; i < count; ++i) {
        if (failed[i]) continue;
        if (arg < 0 || values[i] > best) {
            best = values[i];
            arg = static_cast<int>(i);
        }
    }
    if (arg < 0) throw NumericalError("polytope_norm_matrix: every vertex LP failed");
    return {best, a.apply(nrm.vertices[static_cast<std::size_t>(arg)])};
}

// Dual pruning: a vertex strictly inside the balanced hull of the others is
// redundant. Never lets the set drop below full rank.
PolytopeNorm prune_norm(const PolytopeNorm& nrm) {
    PolytopeNorm out = nrm;
    auto& v = out.vertices;
    while (v.size() > out.dim) {
        bool removed = false;
        for (std::size_t i = v.size(); i-- > 0;) {
            if (i >= v.size() || v.size() <= out.dim) break;
            PolytopeNorm rest = out;
            rest.vertices.erase(rest.vertices.begin() + static_cast<std::ptrdiff_t>(i));
            if (numeric_rank(rest.vertices, out.dim) < out.dim) continue;
            double val;
            try {
                val = polytope_norm_vector(rest, v[i]);
            } catch (const NumericalError&) {
                continue;
            }
            if (val <= 1.0 - out.tol) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                removed = true;
            }
        }
        if (!removed) break;
    }
    return out;
}

class JsrEngine {
public:
    JsrEngine(const MatrixFamily& f, const JsrConfig& cfg, PolytopeNorm norm, bool adaptive)
        : f_(f), cfg_(cfg), norm_(std::move(norm)), adaptive_(adaptive) {}

    JsrReport run() {
        const std::size_t m = f_.size();
        if (!(cfg_.delta > 0.0)) throw InvalidInputError("delta must be positive");
        if (cfg_.max_evals < static_cast<long>(m))
            throw InvalidInputError("max_evals must be at least the family size");
        validate(norm_);
        if (numeric_rank(norm_.vertices, norm_.dim) < norm_.dim)
            throw InvalidInputError("norm vertex set must span R^d");
        for (const Matrix& a : f_.members)
            if (!a.all_finite()) throw InvalidInputError("family member has non-finite entries");

        JsrReport rep;
        SolverMetrics& mt = rep.metrics;
        double lower = 0.0;   // running max of rho(P)^(1/k)
        double upper = kInf;  // from norms
        std::vector<ProductNode> active;

        for (std::size_t i = 0; i < m; ++i) {
            const Matrix& a = f_.members[i];
            double val = 0;
            Vector candidate;
            try {
                auto [v, z] = norm_matrix_impl(norm_, a, true);
                val = v;
                candidate = std::move(z);
            } catch (const NumericalError&) {
                val = kInf;  // a lost norm evaluation can only loosen the upper bound
                ++rep.lp_failures;
            }
            lower = std::max(lower, spectral_radius_only(a));
            if (adaptive_) insert_candidate(candidate, val);
            active.push_back(ProductNode{{static_cast<int>(i + 1)}, a, 1, val});
        }
        upper = -kInf;
        for (const ProductNode& node : active) upper = std::max(upper, node.q_cached);
        if (adaptive_) norm_ = prune_norm(norm_);

        mt.n = 1;
        mt.n_op = static_cast<long>(m);
        long j_prev = static_cast<long>(m);
        mt.j_max = j_prev;
        mt.l_opt = mt.l_slp = 1;

        while (upper - lower >= cfg_.delta && mt.n_op <= cfg_.max_evals && !active.empty()) {
            const double u_old = upper;
            const double l_old = lower;
            const int n = ++mt.n;
            const double inv_n = 1.0 / static_cast<double>(n);
            double u_inner = -kInf;
            std::vector<ProductNode> next;

            for (const ProductNode& prefix : active_ref(active)) {
                for (std::size_t i = 0; i < m; ++i) {
                    Matrix y = prefix.matrix * f_.members[i];
                    if (y.max_abs() > kOverflowGuard)
                        throw OverflowError("product entries exceed 1e150; rescale the family first");
                    double val = 0;
                    Vector candidate;
                    try {
                        auto [v, z] = norm_matrix_impl(norm_, y, true);
                        val = v;
                        candidate = std::move(z);
                    } catch (const NumericalError&) {
                        val = kInf;
                        ++rep.lp_failures;
                    }
                    const double rho_root = std::pow(spectral_radius_only(y), inv_n);
                    const double q = std::min(prefix.q_cached, std::pow(val, inv_n));
                    lower = std::max(lower, rho_root);
                    if (adaptive_) insert_candidate(candidate, val);
                    if (q > lower + cfg_.delta) {
                        u_inner = std::max(u_inner, q);
                        std::vector<int> word = prefix.word;
                        word.push_back(static_cast<int>(i) + 1);
                        next.push_back(ProductNode{std::move(word), std::move(y), n, q});
                    }
                }
            }

            upper = std::min(u_old, std::max(u_inner, lower + cfg_.delta));
            mt.n_op += j_prev * static_cast<long>(m);
            j_prev = static_cast<long>(next.size());
            mt.j_max = std::max(mt.j_max, j_prev);
            if ((u_old - l_old) - (upper - lower) > kImproveTol * std::max(1.0, u_old - l_old))
                mt.l_opt = n;
            if (lower > l_old + kImproveTol * std::max(1.0, l_old)) mt.l_slp = n;
            if (adaptive_) norm_ = prune_norm(norm_);
            active = std::move(next);
        }

        rep.lower = lower;
        rep.upper = upper;
        rep.terminated_by =
            (upper - lower < cfg_.delta) ? Termination::Accuracy : Termination::Budget;
        rep.final_vertices = norm_.vertices;
        return rep;
    }

private:
    const MatrixFamily& f_;
    JsrConfig cfg_;
    PolytopeNorm norm_;
    bool adaptive_;

    static const std::vector<ProductNode>& active_ref(const std::vector<ProductNode>& a) {
        return a;
    }

    void insert_candidate(const Vector& z, double value) {
        if (z.empty() || norm_inf(z) == 0.0) return;
        if (std::isinf(value)) return;
        if (value >= 1.0 - cfg_.tol) norm_.vertices.push_back(z);
    }
};

double power_of(std::size_t base, int exp) {
    double p = 1;
    for (int i = 0; i < exp; ++i) p *= static_cast<double>(base);
    return p;
}

}  // namespace

PolytopeNorm identity_norm(std::size_t dim, double tol) {
    PolytopeNorm n;
    n.dim = dim;
    n.tol = tol;
    for (std::size_t i = 0; i < dim; ++i) {
        Vector e(dim, 0.0);
        e[i] = 1.0;
        n.vertices.push_back(std::move(e));
    }
    return n;
}

double polytope_norm_vector(const PolytopeNorm& nrm, const Vector& z) {
    validate(nrm);
    if (z.size() != nrm.dim) throw InvalidInputError("polytope_norm_vector: dimension mismatch");
    const std::size_t d = nrm.dim;
    const std::size_t p = nrm.vertices.size();

    // min sum(u_i + w_i) s.t. V(u - w) = z, u,w >= 0, written as paired inequalities
    LpProblem lp;
    lp.objective.assign(2 * p, 1.0);
    lp.ineq_matrix = Matrix(2 * d, 2 * p, 0.0);
    lp.ineq_rhs.assign(2 * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double vij = nrm.vertices[j][i];
            lp.ineq_matrix(i, j) = vij;
            lp.ineq_matrix(i, p + j) = -vij;
            lp.ineq_matrix(d + i, j) = -vij;
            lp.ineq_matrix(d + i, p + j) = vij;
        }
        lp.ineq_rhs[i] = z[i];
        lp.ineq_rhs[d + i] = -z[i];
    }
    lp.lower_bounds.assign(2 * p, 0.0);
    lp.upper_bounds.assign(2 * p, kInf);

    const LpOutcome res = solve_lp(lp);
    if (res.status != LpStatus::Optimal)
        throw NumericalError("polytope norm LP failed (vertex set may not span R^d)",
                             res.iterations);
    return std::max(0.0, res.objective_value);
}

std::pair<double, Vector> polytope_norm_matrix(const PolytopeNorm& nrm, const Matrix& a) {
    return norm_matrix_impl(nrm, a, true);
}

JsrReport gripenberg_jsr(const MatrixFamily& f, const JsrConfig& cfg, const PolytopeNorm& norm) {
    JsrEngine engine(f, cfg, norm, false);
    return engine.run();
}

JsrReport adaptive_gripenberg_jsr(const MatrixFamily& f, const JsrConfig& cfg) {
    PolytopeNorm init;
    if (cfg.init_vertices.empty()) {
        init = identity_norm(f.dim, cfg.tol);
    } else {
        init.dim = f.dim;
        init.tol = cfg.tol;
        init.vertices = cfg.init_vertices;
    }

    // Vertex insertion fires on images sticking out of the unit ball, which
    // only stabilizes when the jsr sits at 1: below it no image ever reaches
    // the ball, above it the inserted images compound. A classic pass first
    // locates the best product-based lower bound, the refinement then runs on
    // the family normalized by it, and the bounds are mapped back.
    JsrEngine scout(f, cfg, init, false);
    JsrReport pass1 = scout.run();
    double scale = pass1.lower;
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

    MatrixFamily fn = rescale_family(f, 1.0 / scale);
    JsrConfig cfg_n = cfg;
    cfg_n.delta = cfg.delta / scale;
    JsrEngine engine(fn, cfg_n, std::move(init), true);
    JsrReport rep = engine.run();
    rep.lower *= scale;
    rep.upper *= scale;

    rep.lower = std::max(rep.lower, pass1.lower);
    rep.upper = std::min(rep.upper, pass1.upper);
    rep.metrics.n = std::max(rep.metrics.n, pass1.metrics.n);
    rep.metrics.n_op += pass1.metrics.n_op;
    rep.metrics.j_max = std::max(rep.metrics.j_max, pass1.metrics.j_max);
    rep.lp_failures += pass1.lp_failures;
    return rep;
}

std::vector<std::vector<int>> identify_smp_candidates(const MatrixFamily& f,
                                                      const JsrReport& report, long enum_cap) {
    const int degree = report.metrics.l_slp;
    if (degree < 1) throw InvalidInputError("report carries no s.m.p. degree");
    if (power_of(f.size(), degree) > static_cast<double>(enum_cap))
        throw EnumerationCapError("m^degree exceeds the enumeration cap");

    std::vector<std::pair<std::vector<int>, double>> scored;
    std::vector<int> word(static_cast<std::size_t>(degree));
    std::function<void(int, const Matrix&)> rec = [&](int depth, const Matrix& prefix) {
        if (depth == degree) {
            scored.emplace_back(word, std::pow(spectral_radius_only(prefix),
                                               1.0 / static_cast<double>(degree)));
            return;
        }
        for (std::size_t i = 1; i <= f.size(); ++i) {
            word[static_cast<std::size_t>(depth)] = static_cast<int>(i);
            rec(depth + 1, prefix * f.members[i - 1]);
        }
    };
    rec(0, Matrix::identity(f.dim));

    double best = -kInf;
    for (const auto& [w, val] : scored) best = std::max(best, val);
    std::vector<std::vector<int>> out;
    for (const auto& [w, val] : scored) {
        if (val < best - 1e-9 * std::max(1.0, best)) continue;
        std::vector<int> canon = canonical_rotation(w);
        if (std::find(out.begin(), out.end(), canon) == out.end()) out.push_back(std::move(canon));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace subrad
