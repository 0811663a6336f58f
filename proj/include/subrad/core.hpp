#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace subrad {

using Vector = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Entry magnitude above which semigroup products are considered overflowed
/// and the caller is told to rescale the family first.
constexpr double kOverflowGuard = 1e150;

class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, long iterations = -1)
        : std::runtime_error(msg), iterations(iterations) {}
    long iterations;
};

class EnumerationCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Everything in this project is small and dense,
/// so no sparsity, no views, no expression templates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    Vector col(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    Vector apply(const Vector& x) const;

    Matrix transposed() const;
    Matrix scaled(double c) const;

    double max_abs() const;
    bool all_finite() const;
    bool nonnegative() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

inline double norm_1(const Vector& x) {
    double s = 0;
    for (double v : x) s += std::abs(v);
    return s;
}

inline double norm_inf(const Vector& x) {
    double s = 0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

double frobenius_norm(const Matrix& a);

/// SplitMix64: the fixed, portable generator behind every seeded stream in
/// this project. Seeds are plain 64-bit integers; the draw order per use
/// site is documented next to the consumer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform draw in (0,1): a zero mantissa is bumped to the smallest step.
    double next_positive() {
        double u = next_double();
        return u > 0.0 ? u : 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace subrad
