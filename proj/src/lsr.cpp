#include "subrad/lsr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subrad {

namespace {

// relative guard for "strict improvement": filters pure floating-point noise
// such as rho(A^2) = rho(A)^2 re-derivations
constexpr double kImproveTol = 1e-12;

struct EvalOutcome {
    double a_val = 0.0;
    Vector candidate;
    long failures = 0;
};

class LsrEngine {
public:
    LsrEngine(const MatrixFamily& f, const SolverConfig& cfg, LsrAlgorithm mode,
              bool parallel_sweep)
        : f_(f), cfg_(cfg), mode_(mode), parallel_(parallel_sweep) {}

    SolverReport run();

private:
    const MatrixFamily& f_;
    SolverConfig cfg_;
    LsrAlgorithm mode_;
    bool parallel_;

    PolytopeAntinorm v_;
    bool closed_form_ = false;
    SolverReport rep_;
    BoundsState state_;

    void setup_antinorm();
    EvalOutcome evaluate(const Matrix& y);
    bool insert_candidate(const Vector& z, double value);
    void insert_rescaled_eigenvector(const Matrix& y);
    void snapshot(int degree, long n_op);
    void record_eval(const std::vector<int>& word, double a_val, double rho, double q,
                     bool kept, bool added);
};

void LsrEngine::setup_antinorm() {
    switch (cfg_.init.kind) {
        case InitAntinorm::Kind::Ones:
            v_ = identity_antinorm(f_.dim, cfg_.tol);
            break;
        case InitAntinorm::Kind::LeadingEigenvector: {
            const int idx = cfg_.init.member;
            if (idx < 1 || static_cast<std::size_t>(idx) > f_.size())
                throw InvalidInputError("eigenvector init: member index out of range");
            Vector v = spectral_radius(f_.members[static_cast<std::size_t>(idx - 1)]).leading_vector;
            for (double& e : v) e = std::max(e, 0.0);
            if (norm_1(v) == 0.0)
                throw InvalidInputError("eigenvector init: no usable leading eigenvector");
            v_ = single_vertex_antinorm(std::move(v), cfg_.tol);
            break;
        }
        case InitAntinorm::Kind::Vertices: {
            if (cfg_.init.vertices.empty())
                throw InvalidInputError("vertex init: empty vertex set");
            v_.dim = f_.dim;
            v_.tol = cfg_.tol;
            v_.vertices = cfg_.init.vertices;
            for (const Vector& w : v_.vertices) {
                if (w.size() != f_.dim) throw InvalidInputError("vertex init: dimension mismatch");
                for (double e : w)
                    if (!(e >= 0.0)) throw InvalidInputError("vertex init: vertices must be nonnegative");
                if (norm_1(w) == 0.0) throw InvalidInputError("vertex init: zero vertex");
            }
            break;
        }
    }
    closed_form_ = (mode_ == LsrAlgorithm::S && cfg_.init.kind == InitAntinorm::Kind::Ones);
}

EvalOutcome LsrEngine::evaluate(const Matrix& y) {
    EvalOutcome out;
    if (closed_form_) {
        out.a_val = one_antinorm_matrix(y);
        return out;
    }
    try {
        AntinormValue av = eval_matrix(v_, y);
        out.a_val = av.value;
        out.candidate = std::move(av.candidate);
        out.failures = av.lp_failures;
    } catch (const NumericalError&) {
        // evaluation lost: 0 never overestimates an antinorm, so the bound stays sound
        out.a_val = 0.0;
        out.failures = static_cast<long>(v_.vertex_count());
    }
    return out;
}

bool LsrEngine::insert_candidate(const Vector& z, double value) {
    if (mode_ == LsrAlgorithm::S) return false;
    if (z.empty() || norm_1(z) == 0.0) return false;
    if (value <= 1.0 + cfg_.tol) {
        v_.vertices.push_back(z);
        return true;
    }
    return false;
}

void LsrEngine::insert_rescaled_eigenvector(const Matrix& y) {
    Vector v = spectral_radius(y).leading_vector;
    for (double& e : v) e = std::max(e, 0.0);
    if (norm_1(v) == 0.0) return;
    auto w = subrad::rescaled_eigenvector(v_, v, cfg_.theta);
    if (!w) return;  // eigenvector on the antinorm's null set
    v_.vertices.push_back(std::move(*w));
}

void LsrEngine::snapshot(int degree, long n_op) {
    if (!cfg_.collect_trace) return;
    DegreeSnapshot s;
    s.degree = degree;
    s.lower = state_.lower;
    s.upper = state_.upper;
    s.state_.activecount = static_cast<long>(state_.active.size());
    s.n_op = n_op;
    s.vertex_count = static_cast<long>(v_.vertex_count());
    s.l_slp = rep_.metrics.l_slp;
    s.l_opt = rep_.metrics.l_opt;
    rep_.trace.degrees.push_back(s);
}

void LsrEngine::record_eval(const std::vector<int>& word, double a_val, double rho, double q,
                            bool kept, bool added) {
    if (!cfg_.collect_trace) return;
    rep_.trace.evals.push_back({word, a_val, rho, q, kept, added});
}

SolverReport LsrEngine::run() {
    require_nonnegative(f_);
    const std::size_t m = f_.size();
    if (!(cfg_.delta > 0.0)) throw InvalidInputError("delta must be positive");
    if (cfg_.max_evals < static_cast<long>(m))
        throw InvalidInputError("max_evals must be at least the family size");
    if (mode_ == LsrAlgorithm::E && !(cfg_.theta > 1.0))
        throw InvalidInputError("theta must exceed 1");
    setup_antinorm();

    SolverMetrics& mt = rep_.metrics;

    // degree one: every family member
    for (std::size_t i = 0; i < m; ++i) {
        const Matrix& a = f_.members[i];
        EvalOutcome ev = evaluate(a);
        rep_.lp_failures += ev.failures;
        const double rho = spectral_radius_only(a);
        const double h_before = state_.upper;
        state_.upper = std::min(state_.upper, rho);
        const bool added = insert_candidate(ev.candidate, ev.a_val);
        // algorithm E: a member whose spectral radius attains min{H, rho(A_i)}
        // feeds its rescaled leading eigenvector straight into the vertex set;
        // ties count as attaining
        if (mode_ == LsrAlgorithm::E && rho <= h_before * (1.0 + kImproveTol))
            insert_rescaled_eigenvector(a);
        state_.active.push_back(ProductNode{{static_cast<int>(i + 1)}, a, 1, ev.a_val});
        record_eval(state_.active.back().word, ev.a_val, rho, ev.a_val, true, added);
    }
    state_.lower = kInf;
    for (const ProductNode& node : state_.active) state_.lower = std::min(state_.lower, node.q_cached);
    if (mode_ != LsrAlgorithm::S) v_ = prune(v_);

    mt.n = 1;
    mt.n_op = static_cast<long>(m);
    long j_prev = static_cast<long>(m);
    mt.j_max = j_prev;
    mt.l_opt = mt.l_slp = 1;
    rep_.slp_pool.clear();
    for (const ProductNode& node : state_.active) rep_.slp_pool.push_back(node.word);
    snapshot(1, mt.n_op);

    while (state_.upper - state_.lower >= cfg_.delta && mt.n_op <= cfg_.max_evals && !state_.active.empty()) {
        const double h_old = state_.upper;
        const double l_old = state_.lower;
        const int n = ++mt.n;
        state_.degree = n;
        const double inv_n = 1.0 / static_cast<double>(n);
        double l_inner = kInf;
        std::vector<ProductNode> next;

        auto fold_one = [&](const ProductNode& prefix, int i, Matrix&& y, double a_val,
                            Vector&& candidate, double rho, long failures) {
            rep_.lp_failures += failures;
            const double q = std::max(prefix.q_cached, std::pow(a_val, inv_n));
            const double h_before = state_.upper;
            const double rho_root = std::pow(rho, inv_n);
            state_.upper = std::min(state_.upper, rho_root);
            bool added = false;
            if (mode_ != LsrAlgorithm::S) added = insert_candidate(candidate, a_val);
            // algorithm E: a product attaining min{H, rho^(1/n)} feeds its
            // rescaled leading eigenvector straight into the vertex set, so
            // later evaluations in the same degree already see it; ties count
            if (mode_ == LsrAlgorithm::E && rho_root <= h_before * (1.0 + kImproveTol))
                insert_rescaled_eigenvector(y);
            const bool kept = q < state_.upper - cfg_.delta;
            std::vector<int> word = prefix.word;
            word.push_back(i);
            record_eval(word, a_val, rho, q, kept, added);
            if (kept) {
                l_inner = std::min(l_inner, q);
                next.push_back(ProductNode{std::move(word), std::move(y), n, q});
            }
        };

        if (mode_ == LsrAlgorithm::S) {
            // the antinorm is fixed, so the whole degree can be evaluated in
            // parallel and folded afterwards in enumeration order
            const std::size_t total = state_.active.size() * m;
            const std::size_t block = 4096;
            std::vector<Matrix> ys(std::min(block, total));
            std::vector<double> a_vals(ys.size()), rhos(ys.size());
            std::vector<long> fails(ys.size());
            std::vector<char> overflow(ys.size());
            for (std::size_t start = 0; start < total; start += block) {
                const std::size_t count = std::min(block, total - start);
#ifdef _OPENMP
                bool use_omp = parallel_ && count >= 16 && !omp_in_parallel();
#pragma omp parallel for schedule(dynamic, 8) if (use_omp)
#endif
                for (long long idx = 0; idx < static_cast<long long>(count); ++idx) {
                    const std::size_t g = start + static_cast<std::size_t>(idx);
                    const std::size_t k = g / m;
                    const std::size_t i = g % m;
                    Matrix y = state_.active[k].matrix * f_.members[i];
                    overflow[idx] = y.max_abs() > kOverflowGuard;
                    fails[idx] = 0;
                    if (!overflow[idx]) {
                        if (closed_form_) {
                            a_vals[idx] = one_antinorm_matrix(y);
                        } else {
                            try {
                                AntinormValue av = eval_matrix(v_, y);
                                a_vals[idx] = av.value;
                                fails[idx] = av.lp_failures;
                            } catch (const NumericalError&) {
                                a_vals[idx] = 0.0;
                                fails[idx] = static_cast<long>(v_.vertex_count());
                            }
                        }
                        rhos[idx] = spectral_radius_only(y);
                    }
                    ys[idx] = std::move(y);
                }
                for (std::size_t idx = 0; idx < count; ++idx) {
                    if (overflow[idx])
                        throw OverflowError("product entries exceed 1e150; rescale the family first");
                    const std::size_t g = start + idx;
                    fold_one(state_.active[g / m], static_cast<int>(g % m) + 1, std::move(ys[idx]),
                             a_vals[idx], Vector{}, rhos[idx], fails[idx]);
                }
            }
        } else {
            for (const ProductNode& prefix : state_.active) {
                for (std::size_t i = 0; i < m; ++i) {
                    Matrix y = prefix.matrix * f_.members[i];
                    if (y.max_abs() > kOverflowGuard)
                        throw OverflowError("product entries exceed 1e150; rescale the family first");
                    EvalOutcome ev = evaluate(y);
                    const double rho = spectral_radius_only(y);
                    fold_one(prefix, static_cast<int>(i) + 1, std::move(y), ev.a_val,
                             std::move(ev.candidate), rho, ev.failures);
                }
            }
        }

        state_.lower = std::max(l_old, std::min(l_inner, state_.upper - cfg_.delta));
        mt.n_op += j_prev * static_cast<long>(m);
        j_prev = static_cast<long>(next.size());
        mt.j_max = std::max(mt.j_max, j_prev);
        if ((h_old - l_old) - (state_.upper - state_.lower) > kImproveTol * std::max(1.0, h_old - l_old))
            mt.l_opt = n;
        if (state_.upper < h_old * (1.0 - kImproveTol)) {
            mt.l_slp = n;
            rep_.slp_pool.clear();
            for (const ProductNode& node : next) rep_.slp_pool.push_back(node.word);
        }
        if (mode_ != LsrAlgorithm::S) v_ = prune(v_);
        state_.active = std::move(next);
        snapshot(n, mt.n_op);
    }

    rep_.lower = state_.lower;
    rep_.upper = state_.upper;
    rep_.terminated_by =
        (state_.upper - state_.lower < cfg_.delta) ? Termination::Accuracy : Termination::Budget;
    rep_.final_vertices = v_.vertices;
    return rep_;
}

// Depth-first enumeration of all products up to `degree`, sharing prefix
// products. `visit` sees every nonempty word, leaves included.
void enumerate_words(const MatrixFamily& f, int degree,
                     const std::function<void(const std::vector<int>&, const Matrix&)>& visit) {
    std::vector<int> word;
    std::vector<Matrix> stack;
    stack.push_back(Matrix::identity(f.dim));
    std::function<void()> rec = [&]() {
        if (static_cast<int>(word.size()) == degree) return;
        for (std::size_t i = 1; i <= f.size(); ++i) {
            word.push_back(static_cast<int>(i));
            Matrix y = stack.back() * f.members[i - 1];
            if (y.max_abs() > kOverflowGuard)
                throw OverflowError("product entries exceed 1e150; rescale the family first");
            stack.push_back(std::move(y));
            visit(word, stack.back());
            rec();
            stack.pop_back();
            word.pop_back();
        }
    };
    rec();
}

double power_of(std::size_t base, int exp) {
    double p = 1;
    for (int i = 0; i < exp; ++i) p *= static_cast<double>(base);
    return p;
}

}  // namespace

SolverReport run_lsr(const MatrixFamily& f, const SolverConfig& cfg, LsrAlgorithm which) {
    LsrEngine engine(f, cfg, which, true);
    return engine.run();
}

SolverReport run_algorithm_s(const MatrixFamily& f, const SolverConfig& cfg) {
    return run_lsr(f, cfg, LsrAlgorithm::S);
}

SolverReport run_algorithm_a(const MatrixFamily& f, const SolverConfig& cfg) {
    return run_lsr(f, cfg, LsrAlgorithm::A);
}

SolverReport run_algorithm_e(const MatrixFamily& f, const SolverConfig& cfg) {
    return run_lsr(f, cfg, LsrAlgorithm::E);
}

SolverReport run_algorithm_s_serial(const MatrixFamily& f, const SolverConfig& cfg) {
    LsrEngine engine(f, cfg, LsrAlgorithm::S, false);
    return engine.run();
}

std::vector<int> canonical_rotation(const std::vector<int>& word) {
    if (word.empty()) return word;
    std::vector<int> best = word;
    std::vector<int> rot = word;
    for (std::size_t r = 1; r < word.size(); ++r) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

std::vector<std::vector<int>> identify_slp_candidates(const MatrixFamily& f,
                                                      const SolverReport& report, SlpMode mode,
                                                      long enum_cap) {
    const int degree = report.metrics.l_slp;
    if (degree < 1) throw InvalidInputError("report carries no s.l.p. degree");

    std::vector<std::pair<std::vector<int>, double>> scored;
    if (mode == SlpMode::EnumerateAll) {
        if (power_of(f.size(), degree) > static_cast<double>(enum_cap))
            throw EnumerationCapError(
                "m^l_slp exceeds the enumeration cap; use the from-active mode");
        enumerate_words(f, degree, [&](const std::vector<int>& word, const Matrix& p) {
            if (static_cast<int>(word.size()) != degree) return;
            scored.emplace_back(word, std::pow(spectral_radius_only(p),
                                               1.0 / static_cast<double>(degree)));
        });
    } else {
        if (report.slp_pool.empty())
            throw InvalidInputError("report retains no products at the s.l.p. degree");
        for (const std::vector<int>& word : report.slp_pool) {
            const Matrix p = materialize(word, f).matrix;
            scored.emplace_back(word, std::pow(spectral_radius_only(p),
                                               1.0 / static_cast<double>(degree)));
        }
    }

    double best = kInf;
    for (const auto& [word, val] : scored) best = std::min(best, val);
    std::vector<std::vector<int>> out;
    for (const auto& [word, val] : scored) {
        if (val > best + 1e-9 * std::max(1.0, best)) continue;
        std::vector<int> canon = canonical_rotation(word);
        if (std::find(out.begin(), out.end(), canon) == out.end()) out.push_back(std::move(canon));
    }
    std::sort(out.begin(), out.end());
    return out;
}

double alpha_k_oracle(const MatrixFamily& f, const PolytopeAntinorm& a, int k, long enum_cap) {
    if (k < 1) throw InvalidInputError("k must be >= 1");
    if (power_of(f.size(), k) > static_cast<double>(enum_cap))
        throw EnumerationCapError("m^k exceeds the enumeration cap");
    double best = kInf;
    enumerate_words(f, k, [&](const std::vector<int>& word, const Matrix& p) {
        if (static_cast<int>(word.size()) != k) return;
        best = std::min(best, std::pow(eval_matrix(a, p).value, 1.0 / static_cast<double>(k)));
    });
    return best;
}

double brute_force_lsr_upper(const MatrixFamily& f, int k_max, long enum_cap) {
    if (k_max < 1) throw InvalidInputError("k_max must be >= 1");
    double total = 0;
    for (int k = 1; k <= k_max; ++k) total += power_of(f.size(), k);
    if (total > static_cast<double>(enum_cap))
        throw EnumerationCapError("enumeration cap exceeded");
    double best = kInf;
    enumerate_words(f, k_max, [&](const std::vector<int>& word, const Matrix& p) {
        best = std::min(best, std::pow(spectral_radius_only(p),
                                       1.0 / static_cast<double>(word.size())));
    });
    return best;
}

SolverReport iterative_rescaling_driver(const MatrixFamily& f, const DriverConfig& cfg,
                                        LsrAlgorithm variant) {
    if (cfg.max_iter < 1) throw InvalidInputError("max_iter must be >= 1");
    if (variant == LsrAlgorithm::S)
        throw InvalidInputError("the rescaling driver drives the adaptive variants only");
    require_nonnegative(f);

    // scale-finding pass with a small budget; its lower bound sets the first rescale
    SolverConfig pre = cfg.inner;
    pre.collect_trace = false;
    pre.max_evals = std::max<long>(static_cast<long>(f.size()), cfg.preliminary_evals);
    const SolverReport rep0 = run_lsr(f, pre, variant);

    double scale = 1.0;
    if (rep0.lower > 0.0 && std::isfinite(rep0.lower)) scale = 1.0 / rep0.lower;

    SolverReport last;
    double prev_lower = kInf;
    bool gap_ok = false;
    int j = 0;
    std::vector<Vector> warm;
    while (j < cfg.max_iter) {
        ++j;
        MatrixFamily fj = rescale_family(f, scale);
        SolverConfig inner = cfg.inner;
        if (j > 1) inner.init = InitAntinorm::explicit_vertices(warm);
        last = run_lsr(fj, inner, variant);
        gap_ok = last.upper - last.lower < inner.delta;
        const bool stalled = j >= 2 && std::abs(last.lower - prev_lower) < inner.delta;
        prev_lower = last.lower;
        warm = last.final_vertices;
        if (gap_ok || stalled) break;
        if (!(last.lower > 0.0) || !std::isfinite(last.lower)) break;  // cannot rescale further
        if (j < cfg.max_iter) scale /= last.lower;
    }

    last.lower /= scale;
    last.upper /= scale;
    last.rescale_applied = scale;
    last.driver_iterations = j;
    last.terminated_by = gap_ok ? Termination::Accuracy : Termination::Budget;
    try {
        last.slp_candidates = identify_slp_candidates(f, last, SlpMode::EnumerateAll, cfg.slp_enum_cap);
    } catch (const EnumerationCapError&) {
        last.slp_candidates = identify_slp_candidates(f, last, SlpMode::FromActive, cfg.slp_enum_cap);
    }
    return last;
}

std::vector<RegularizationEntry> regularized_lsr(const MatrixFamily& f, const SolverConfig& cfg,
                                                 LsrAlgorithm variant,
                                                 const std::vector<double>& epsilons,
                                                 std::uint64_t perturbation_seed) {
    require_nonnegative(f);
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] >= 0.0)) throw InvalidInputError("epsilon must be nonnegative");
        if (i > 0 && epsilons[i] >= epsilons[i - 1])
            throw InvalidInputError("epsilon values must be strictly descending");
    }

    // one Delta realization shared across the whole ladder
    SplitMix64 rng(perturbation_seed);
    std::vector<Matrix> deltas;
    for (std::size_t k = 0; k < f.size(); ++k) {
        Matrix d(f.dim, f.dim);
        for (std::size_t i = 0; i < f.dim; ++i)
            for (std::size_t j = 0; j < f.dim; ++j) d(i, j) = rng.next_positive();
        const double fn = frobenius_norm(d);
        for (double& v : d.data()) v /= fn;
        deltas.push_back(std::move(d));
    }

    std::vector<RegularizationEntry> out;
    for (double eps : epsilons) {
        MatrixFamily fe = f;
        if (eps > 0.0) {
            for (std::size_t k = 0; k < f.size(); ++k)
                for (std::size_t idx = 0; idx < fe.members[k].data().size(); ++idx)
                    fe.members[k].data()[idx] += eps * deltas[k].data()[idx];
        }
        RegularizationEntry entry;
        entry.epsilon = eps;
        entry.report = run_lsr(fe, cfg, variant);
        try {
            entry.report.slp_candidates =
                identify_slp_candidates(fe, entry.report, SlpMode::EnumerateAll);
        } catch (const EnumerationCapError&) {
            entry.report.slp_candidates =
                identify_slp_candidates(fe, entry.report, SlpMode::FromActive);
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace subrad
