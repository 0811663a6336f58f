#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subrad/core.hpp"

namespace subrad {

/// Ordered family F = {A_1, ..., A_m} of dense d x d matrices.
struct MatrixFamily {
    std::size_t dim = 0;
    std::vector<Matrix> members;
    std::vector<std::string> labels;
    double rescale = 1.0;    // multiplicative factor already applied
    bool transposed = false; // true when members are the transpose of the user's input

    std::size_t size() const { return members.size(); }
};

MatrixFamily make_family(std::vector<Matrix> members,
                         std::vector<std::string> labels = {});

/// Throws InvalidInputError unless every member is nonnegative (LSR entry points).
void require_nonnegative(const MatrixFamily& f);

/// One node of the product semigroup: index word, materialized matrix and
/// the running prefix score q carried from degree to degree.
struct ProductNode {
    std::vector<int> word; // 1-based member indices, left-to-right order
    Matrix matrix;
    int degree = 0;
    double q_cached = 0.0;
};

ProductNode identity_node(std::size_t dim);
ProductNode extend_product(const ProductNode& node, int i, const MatrixFamily& f);
ProductNode materialize(const std::vector<int>& word, const MatrixFamily& f);

struct SpectralInfo {
    double rho = 0.0;
    Vector leading_vector;     // unit 1-norm; nonnegative for nonnegative input
    bool simple_dominant = false;
};

/// All eigenvalues as (re, im) pairs, via Hessenberg reduction + Francis QR.
std::vector<std::pair<double, double>> eigenvalues(const Matrix& a);

/// Full spectral information (QR eigenvalues + leading eigenvector).
SpectralInfo spectral_radius(const Matrix& a);

/// Just the spectral radius, on the cheapest safe path: closed forms for
/// d <= 2 and triangular matrices, Perron iteration for nonnegative input,
/// QR otherwise or on stagnation.
double spectral_radius_only(const Matrix& a);

/// Perron power iteration (diagonal shift added so peripheral eigenvalues
/// cannot stall it). Returns rho and the eigenvector, or nullopt on stagnation.
std::optional<SpectralInfo> perron_iteration(const Matrix& a,
                                             double rel_tol = 1e-12,
                                             int max_iter = 2000);

MatrixFamily rescale_family(const MatrixFamily& f, double c);
MatrixFamily transpose_family(const MatrixFamily& f);

bool is_asymptotically_rank_one(const Matrix& a, double gap_tol = 1e-8);

/// c(A) = max_j (max_i a_ij / min_i a_ij) for strictly positive A.
double embedded_cone_constant(const Matrix& a);

}  // namespace subrad
