#include "subrad/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace subrad {

namespace {
using cd = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

Vector Matrix::apply(const Vector& x) const {
    Vector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0;
        const double* row = data_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::scaled(double c) const {
    Matrix s = *this;
    for (double& v : s.data()) v *= c;
    return s;
}

double Matrix::max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

bool Matrix::nonnegative() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidInputError("matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double frobenius_norm(const Matrix& a) {
    double s = 0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

MatrixFamily make_family(std::vector<Matrix> members, std::vector<std::string> labels) {
    if (members.empty()) throw InvalidInputError("family must contain at least one matrix");
    const std::size_t d = members.front().rows();
    for (const Matrix& m : members) {
        if (!m.square() || m.rows() != d)
            throw InvalidInputError("family members must be square and share one dimension");
        if (!m.all_finite()) throw InvalidInputError("family member has non-finite entries");
    }
    MatrixFamily f;
    f.dim = d;
    f.members = std::move(members);
    f.labels = std::move(labels);
    return f;
}

void require_nonnegative(const MatrixFamily& f) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!f.members[i].nonnegative())
            throw InvalidInputError("LSR solvers require a nonnegative family; member " +
                                    std::to_string(i + 1) + " has negative entries");
}

ProductNode identity_node(std::size_t dim) {
    return ProductNode{{}, Matrix::identity(dim), 0, 0.0};
}

ProductNode extend_product(const ProductNode& node, int i, const MatrixFamily& f) {
    if (i < 1 || static_cast<std::size_t>(i) > f.size())
        throw InvalidInputError("member index out of range");
    ProductNode out;
    out.word = node.word;
    out.word.push_back(i);
    out.matrix = node.matrix * f.members[static_cast<std::size_t>(i - 1)];
    out.degree = node.degree + 1;
    out.q_cached = node.q_cached;
    if (out.matrix.max_abs() > kOverflowGuard)
        throw OverflowError("product entries exceed 1e150; rescale the family first");
    return out;
}

ProductNode materialize(const std::vector<int>& word, const MatrixFamily& f) {
    ProductNode node = identity_node(f.dim);
    for (int i : word) node = extend_product(node, i, f);
    return node;
}

MatrixFamily rescale_family(const MatrixFamily& f, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInputError("rescale factor must be positive");
    MatrixFamily out = f;
    for (Matrix& m : out.members) m = m.scaled(c);
    out.rescale = f.rescale * c;
    return out;
}

MatrixFamily transpose_family(const MatrixFamily& f) {
    MatrixFamily out = f;
    for (Matrix& m : out.members) m = m.transposed();
    out.transposed = !f.transposed;
    return out;
}

namespace {

bool is_triangular(const Matrix& a, bool upper) {
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (upper ? (i > j) : (i < j)) {
                if (a(i, j) != 0.0) return false;
            }
        }
    return true;
}

std::pair<cd, cd> eig2x2(double a, double b, double c, double d) {
    // normalize scale first: tr^2 and 4*det underflow for very deep products
    const double scale = std::max(std::max(std::abs(a), std::abs(b)),
                                  std::max(std::abs(c), std::abs(d)));
    if (scale == 0.0) return {cd(0, 0), cd(0, 0)};
    a /= scale; b /= scale; c /= scale; d /= scale;
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // stable pairing: compute the larger-magnitude root first
        double l1 = (tr >= 0.0) ? (tr + s) / 2.0 : (tr - s) / 2.0;
        double l2 = (l1 != 0.0) ? det / l1 : (tr - std::copysign(s, tr)) / 2.0;
        return {cd(scale * l1, 0.0), cd(scale * l2, 0.0)};
    }
    const double s = std::sqrt(-disc) / 2.0;
    return {cd(scale * tr / 2.0, scale * s), cd(scale * tr / 2.0, -scale * s)};
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(std::vector<double>& h, std::size_t n) {
    auto H = [&](std::size_t i, std::size_t j) -> double& { return h[i * n + j]; };
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += H(i, k) * H(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm <= 0.0) continue;
        const double x0 = H(k + 1, k);
        const double alpha = (x0 >= 0.0) ? -xnorm : xnorm;
        double vnorm2 = 0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = H(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 <= 0.0) continue;
        const double beta = 2.0 / vnorm2;
        // H = P H, rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            double s = 0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * H(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) H(i, j) -= s * v[i];
        }
        // H = H P, cols k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = k + 1; j < n; ++j) s += H(i, j) * v[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) H(i, j) -= s * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) H(i, k) = 0.0;
    }
}

// Complex Givens rotation G with G*[x;y] = [r;0].
struct Givens {
    cd g11, g12, g21, g22;
};

Givens make_givens(cd x, cd y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ay == 0.0) return {cd(1, 0), cd(0, 0), cd(0, 0), cd(1, 0)};
    const double r = std::hypot(ax, ay);
    return {std::conj(x) / r, std::conj(y) / r, -y / r, x / r};
}

// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
// Wilkinson shifts. Works block by block, deflating converged eigenvalues
// from the bottom.
std::vector<cd> hessenberg_eigenvalues(const std::vector<double>& hreal, std::size_t n) {
    std::vector<cd> h(n * n);
    for (std::size_t i = 0; i < n * n; ++i) h[i] = cd(hreal[i], 0.0);
    auto H = [&](std::size_t i, std::size_t j) -> cd& { return h[i * n + j]; };

    std::vector<cd> eig(n);
    double hnorm = 0;
    for (std::size_t i = 0; i < n * n; ++i) hnorm = std::max(hnorm, std::abs(h[i]));
    if (hnorm == 0.0) return eig;  // zero matrix

    long total_iter = 0;
    const long max_total = 60 * static_cast<long>(n) + 200;
    std::size_t hi = n - 1;
    int stuck = 0;
    while (true) {
        // deflate trivial trailing blocks
        while (true) {
            if (hi == 0) {
                eig[0] = H(0, 0);
                return eig;
            }
            double off = std::abs(H(hi, hi - 1));
            double scale = std::abs(H(hi - 1, hi - 1)) + std::abs(H(hi, hi));
            if (scale == 0.0) scale = hnorm;
            if (off <= kEps * scale) {
                H(hi, hi - 1) = 0;
                eig[hi] = H(hi, hi);
                --hi;
                stuck = 0;
                continue;
            }
            break;
        }
        // find the top of the active block
        std::size_t lo = hi;
        while (lo > 0) {
            double off = std::abs(H(lo, lo - 1));
            double scale = std::abs(H(lo - 1, lo - 1)) + std::abs(H(lo, lo));
            if (scale == 0.0) scale = hnorm;
            if (off <= kEps * scale) {
                H(lo, lo - 1) = 0;
                break;
            }
            --lo;
        }
        if (lo + 1 == hi) {
            // closed-form 2x2 deflation
            cd a = H(lo, lo), b = H(lo, hi), c = H(hi, lo), d = H(hi, hi);
            cd tr = a + d, det = a * d - b * c;
            cd disc = std::sqrt(tr * tr - 4.0 * det);
            eig[hi] = (tr + disc) / 2.0;
            eig[lo] = (tr - disc) / 2.0;
            if (lo == 0) return eig;
            hi = lo - 1;
            stuck = 0;
            continue;
        }

        if (++total_iter > max_total)
            throw NumericalError("eigenvalue QR iteration did not converge", total_iter);

        cd shift;
        if (++stuck > 0 && stuck % 24 == 0) {
            shift = H(hi, hi) + cd(0.75 * std::abs(H(hi, hi - 1)), 0.0);
        } else {
            cd a = H(hi - 1, hi - 1), b = H(hi - 1, hi), c = H(hi, hi - 1), d = H(hi, hi);
            cd tr = a + d, det = a * d - b * c;
            cd disc = std::sqrt(tr * tr - 4.0 * det);
            cd m1 = (tr + disc) / 2.0, m2 = (tr - disc) / 2.0;
            shift = (std::abs(m1 - d) <= std::abs(m2 - d)) ? m1 : m2;
        }

        cd x = H(lo, lo) - shift;
        cd y = H(lo + 1, lo);
        for (std::size_t k = lo; k < hi; ++k) {
            Givens g = make_givens(x, y);
            const std::size_t c0 = (k > lo) ? k - 1 : lo;
            for (std::size_t j = c0; j <= hi; ++j) {
                cd t1 = H(k, j), t2 = H(k + 1, j);
                H(k, j) = g.g11 * t1 + g.g12 * t2;
                H(k + 1, j) = g.g21 * t1 + g.g22 * t2;
            }
            const std::size_t rmax = std::min(hi, k + 2);
            for (std::size_t i = lo; i <= rmax; ++i) {
                cd t1 = H(i, k), t2 = H(i, k + 1);
                H(i, k) = t1 * std::conj(g.g11) + t2 * std::conj(g.g12);
                H(i, k + 1) = t1 * std::conj(g.g21) + t2 * std::conj(g.g22);
            }
            if (k + 1 < hi) {
                x = H(k + 1, k);
                y = H(k + 2, k);
            }
        }
    }
}

// LU solve with partial pivoting; returns false on a structurally singular pivot.
bool lu_solve(Matrix a, Vector& x) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> piv(n);
    std::iota(piv.begin(), piv.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(x[k], x[p]);
        }
        double pivot = a(k, k);
        if (pivot == 0.0) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / pivot;
            a(i, k) = 0;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return true;
}

// Eigenvector by inverse iteration at an already-computed eigenvalue.
Vector inverse_iteration(const Matrix& a, double lambda) {
    const std::size_t n = a.rows();
    const double scale = std::max(1.0, a.max_abs());
    Vector x(n, 1.0 / static_cast<double>(n));
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double mu = lambda + scale * 1e-11 * static_cast<double>(attempt + 1);
        Matrix shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= mu;
        Vector y = x;
        bool ok = true;
        for (int it = 0; it < 6 && ok; ++it) {
            Vector rhs = y;
            ok = lu_solve(shifted, rhs);
            if (!ok) break;
            const double nrm = norm_inf(rhs);
            if (!(nrm > 0) || !std::isfinite(nrm)) {
                ok = false;
                break;
            }
            for (double& v : rhs) v /= nrm;
            y = rhs;
        }
        if (ok) {
            x = y;
            break;
        }
    }
    double s = std::accumulate(x.begin(), x.end(), 0.0);
    if (s < 0)
        for (double& v : x) v = -v;
    const double n1 = norm_1(x);
    if (n1 > 0)
        for (double& v : x) v /= n1;
    return x;
}

}  // namespace

std::vector<std::pair<double, double>> eigenvalues(const Matrix& a) {
    if (!a.square()) throw InvalidInputError("eigenvalues: matrix must be square");
    if (!a.all_finite()) throw InvalidInputError("eigenvalues: non-finite entries");
    const std::size_t n = a.rows();
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    if (n == 0) return out;
    if (n == 1) {
        out.emplace_back(a(0, 0), 0.0);
        return out;
    }
    if (is_triangular(a, true) || is_triangular(a, false)) {
        for (std::size_t i = 0; i < n; ++i) out.emplace_back(a(i, i), 0.0);
        return out;
    }
    if (n == 2) {
        auto [l1, l2] = eig2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        out.emplace_back(l1.real(), l1.imag());
        out.emplace_back(l2.real(), l2.imag());
        return out;
    }
    const double scale = a.max_abs();
    if (scale == 0.0) {
        out.assign(n, {0.0, 0.0});
        return out;
    }
    std::vector<double> h = a.data();
    for (double& v : h) v /= scale;
    hessenberg(h, n);
    for (const cd& z : hessenberg_eigenvalues(h, n))
        out.emplace_back(scale * z.real(), scale * z.imag());
    return out;
}

std::optional<SpectralInfo> perron_iteration(const Matrix& a_in, double rel_tol, int max_iter) {
    const std::size_t n = a_in.rows();
    if (n == 0) return std::nullopt;
    // iterate at unit scale so the convergence checks stay meaningful for
    // very small or very large inputs
    const double scale = a_in.max_abs();
    if (scale == 0.0) {
        SpectralInfo info;
        info.rho = 0.0;
        info.leading_vector.assign(n, 1.0 / static_cast<double>(n));
        return info;
    }
    const Matrix a = a_in.scaled(1.0 / scale);
    // diagonal shift keeps peripheral eigenvalues from stalling the iteration
    const double sigma = 0.05;
    Vector x(n, 1.0 / static_cast<double>(n));
    double lambda_prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector ax = a.apply(x);
        Vector y = ax;
        for (std::size_t i = 0; i < n; ++i) y[i] += sigma * x[i];
        const double ynorm = norm_1(y);
        if (!(ynorm > 0)) {
            // x landed in the kernel; rho could still be positive elsewhere
            return std::nullopt;
        }
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num += x[i] * ax[i];
            den += x[i] * x[i];
        }
        const double lambda = num / den;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
        if (it > 0 && std::abs(lambda - lambda_prev) <= rel_tol * std::max(1.0, std::abs(lambda))) {
            Vector res = a.apply(x);
            double rmax = 0;
            for (std::size_t i = 0; i < n; ++i) rmax = std::max(rmax, std::abs(res[i] - lambda * x[i]));
            if (rmax <= 1e-11) {
                const double n1 = norm_1(x);
                for (double& v : x) v /= n1;
                SpectralInfo info;
                info.rho = std::max(0.0, lambda) * scale;
                info.leading_vector = x;
                info.simple_dominant = false;  // caller decides via the full spectrum
                return info;
            }
        }
        lambda_prev = lambda;
    }
    return std::nullopt;
}

double spectral_radius_only(const Matrix& a) {
    if (!a.square()) throw InvalidInputError("spectral radius: matrix must be square");
    if (!a.all_finite()) throw InvalidInputError("spectral radius: non-finite entries");
    const std::size_t n = a.rows();
    if (n == 1) return std::abs(a(0, 0));
    if (is_triangular(a, true) || is_triangular(a, false)) {
        double m = 0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a(i, i)));
        return m;
    }
    if (n == 2) {
        auto [l1, l2] = eig2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        return std::max(std::abs(l1), std::abs(l2));
    }
    if (a.nonnegative()) {
        if (auto p = perron_iteration(a)) return p->rho;
    }
    double m = 0;
    for (auto [re, im] : eigenvalues(a)) m = std::max(m, std::hypot(re, im));
    return m;
}

SpectralInfo spectral_radius(const Matrix& a) {
    if (!a.square()) throw InvalidInputError("spectral radius: matrix must be square");
    if (!a.all_finite()) throw InvalidInputError("spectral radius: non-finite entries");
    const std::size_t n = a.rows();
    SpectralInfo info;
    const auto eigs = eigenvalues(a);
    double rho = 0;
    for (auto [re, im] : eigs) rho = std::max(rho, std::hypot(re, im));
    info.rho = rho;

    // second-largest modulus and the dominant real eigenvalue, if any
    double second = 0;
    bool dominant_real = false;
    int at_top = 0;
    double top_real = 0;
    for (auto [re, im] : eigs) {
        const double mod = std::hypot(re, im);
        if (mod >= rho * (1.0 - 1e-10)) {
            ++at_top;
            if (im == 0.0 || std::abs(im) <= 1e-12 * std::max(1.0, std::abs(re))) {
                dominant_real = true;
                top_real = re;
            }
        } else {
            second = std::max(second, mod);
        }
    }
    info.simple_dominant = (rho > 0) && (at_top == 1) && dominant_real &&
                           (second < rho * (1.0 - 1e-8));

    if (rho == 0.0 || n == 0) {
        info.leading_vector.assign(n, 0.0);
        return info;
    }
    if (a.nonnegative()) {
        if (auto p = perron_iteration(a)) {
            info.leading_vector = p->leading_vector;
            return info;
        }
    }
    if (dominant_real) {
        info.leading_vector = inverse_iteration(a, top_real);
    } else {
        info.leading_vector.assign(n, 0.0);  // dominant pair is complex
    }
    return info;
}

bool is_asymptotically_rank_one(const Matrix& a, double gap_tol) {
    if (!a.all_finite()) throw InvalidInputError("non-finite entries");
    const auto eigs = eigenvalues(a);
    double rho = 0;
    for (auto [re, im] : eigs) rho = std::max(rho, std::hypot(re, im));
    if (!(rho > 0)) return false;
    int at_top = 0;
    bool top_is_real = false;
    for (auto [re, im] : eigs) {
        const double mod = std::hypot(re, im);
        if (mod >= rho * (1.0 - gap_tol)) {
            ++at_top;
            if (std::abs(im) <= 1e-10 * rho) top_is_real = true;
        }
    }
    return at_top == 1 && top_is_real;
}

double embedded_cone_constant(const Matrix& a) {
    if (!a.square()) throw InvalidInputError("embedded cone constant: matrix must be square");
    const std::size_t n = a.rows();
    double c = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double colmax = -kInf, colmin = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = a(i, j);
            if (!(v > 0.0))
                throw InvalidInputError("embedded cone constant requires strictly positive entries");
            colmax = std::max(colmax, v);
            colmin = std::min(colmin, v);
        }
        c = std::max(c, colmax / colmin);
    }
    return c;
}

}  // namespace subrad
