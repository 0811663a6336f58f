#pragma once

#include <cstdint>
#include <vector>

#include "subrad/antinorm.hpp"
#include "subrad/matrix_core.hpp"

namespace subrad {

enum class LsrAlgorithm { S, A, E };
enum class Termination { Accuracy, Budget };

struct InitAntinorm {
    enum class Kind { Ones, LeadingEigenvector, Vertices };
    Kind kind = Kind::Ones;
    int member = 1;                // 1-based index, LeadingEigenvector only
    std::vector<Vector> vertices;  // Vertices only

    static InitAntinorm ones() { return {}; }
    static InitAntinorm eigenvector(int member) {
        InitAntinorm i;
        i.kind = Kind::LeadingEigenvector;
        i.member = member;
        return i;
    }
    static InitAntinorm explicit_vertices(std::vector<Vector> v) {
        InitAntinorm i;
        i.kind = Kind::Vertices;
        i.vertices = std::move(v);
        return i;
    }
};

struct SolverConfig {
    double delta = 1e-6;
    long max_evals = 1000;  // M: budget of matrix-antinorm evaluations
    double theta = 1.005;   // algorithm E scaling parameter
    double tol = 1e-9;      // insertion / pruning tolerance
    InitAntinorm init;
    bool collect_trace = false;
};

/// Running state of one bounding pass: t_k / s_k plus the active product set.
struct BoundsState {
    double lower = 0.0;
    double upper = kInf;
    std::vector<ProductNode> active;  // S_k (S_k* for adaptive runs); q cached per node
    int degree = 1;
};

struct SolverMetrics {
    int l_opt = 1;   // degree with the best bounds gap
    int l_slp = 1;   // degree of the last strict upper-bound improvement
    int n = 1;       // highest degree explored
    long n_op = 0;   // matrix-antinorm evaluations
    long j_max = 0;  // largest |S_k|
};

struct EvalRecord {
    std::vector<int> word;
    double antinorm_value = 0;
    double rho = 0;
    double q = 0;
    bool kept = false;
    bool vertex_added = false;
};

struct DegreeSnapshot {
    int degree = 0;
    double lower = 0;
    double upper = 0;
    long active_count = 0;
    long n_op = 0;
    long vertex_count = 0;
    int l_slp = 1;
    int l_opt = 1;
};

struct SolverTrace {
    std::vector<EvalRecord> evals;
    std::vector<DegreeSnapshot> degrees;
};

struct SolverReport {
    double lower = 0.0;
    double upper = kInf;
    SolverMetrics metrics;
    std::vector<std::vector<int>> slp_candidates;  // cyclic-permutation representatives
    std::vector<Vector> final_vertices;
    long lp_failures = 0;
    Termination terminated_by = Termination::Budget;
    double rescale_applied = 1.0;  // driver: cumulative factor applied to the input
    int driver_iterations = 0;
    std::vector<std::vector<int>> slp_pool;  // words of S_{l_slp}, for SlpMode::FromActive
    SolverTrace trace;                       // populated when cfg.collect_trace
};

SolverReport run_algorithm_s(const MatrixFamily& f, const SolverConfig& cfg);
SolverReport run_algorithm_a(const MatrixFamily& f, const SolverConfig& cfg);
SolverReport run_algorithm_e(const MatrixFamily& f, const SolverConfig& cfg);
SolverReport run_lsr(const MatrixFamily& f, const SolverConfig& cfg, LsrAlgorithm which);

/// Algorithm S with its per-degree evaluation sweep forced onto the serial
/// path; the parallel sweep folds results in enumeration order, so the two
/// are identical. Kept for tests and the kernel benchmark.
SolverReport run_algorithm_s_serial(const MatrixFamily& f, const SolverConfig& cfg);

enum class SlpMode { EnumerateAll, FromActive };

/// Minimizers of rho(P)^(1/l_slp), one canonical word per cyclic class.
std::vector<std::vector<int>> identify_slp_candidates(const MatrixFamily& f,
                                                      const SolverReport& report, SlpMode mode,
                                                      long enum_cap = 1L << 20);

/// Brute-force min over all m^k products of a(P)^(1/k).
double alpha_k_oracle(const MatrixFamily& f, const PolytopeAntinorm& a, int k,
                      long enum_cap = 1L << 20);

/// min over 1 <= j <= k_max of min over all degree-j products of rho(P)^(1/j).
double brute_force_lsr_upper(const MatrixFamily& f, int k_max, long enum_cap = 1L << 22);

struct DriverConfig {
    SolverConfig inner;
    int max_iter = 20;
    long preliminary_evals = 10;  // budget of the scale-finding first pass
    long slp_enum_cap = 1L << 20;
};

/// Rescale-restart strategy: preliminary low-budget run, rescale by 1/L,
/// then repeated warm-started runs until the (relative) gap or the change in
/// the lower bound drops below delta. Bounds are mapped back to the scale of
/// the input family.
SolverReport iterative_rescaling_driver(const MatrixFamily& f, const DriverConfig& cfg,
                                        LsrAlgorithm variant);

struct RegularizationEntry {
    double epsilon = 0;
    SolverReport report;
};

/// Runs the chosen variant on F + eps*{Delta_i} for each eps, with strictly
/// positive Frobenius-normalized Delta_i drawn once from perturbation_seed
/// (SplitMix64; per matrix, entries row-major).
std::vector<RegularizationEntry> regularized_lsr(const MatrixFamily& f, const SolverConfig& cfg,
                                                 LsrAlgorithm variant,
                                                 const std::vector<double>& epsilons,
                                                 std::uint64_t perturbation_seed);

/// Lexicographically smallest rotation; the canonical representative used in
/// reports and tests.
std::vector<int> canonical_rotation(const std::vector<int>& word);

}  // namespace subrad
