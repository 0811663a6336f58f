#include <doctest.h>

#include <cmath>

#include "subrad/families.hpp"
#include "subrad/matrix_core.hpp"

using namespace subrad;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m(0, 0) = a; m(0, 1) = b; m(1, 0) = c; m(1, 1) = d;
    return m;
}

Matrix random_nonneg(std::size_t d, SplitMix64& rng) {
    Matrix m(d, d);
    for (double& v : m.data()) v = rng.next_double();
    return m;
}

const double kRoot8 = std::pow(4.0 * (213803.0 + std::sqrt(44666192953.0)), 1.0 / 8.0);

}  // namespace

TEST_CASE("spectral radius of a triangular matrix is its diagonal maximum") {
    CHECK(spectral_radius_only(mat2(7, 0, 2, 3)) == 7.0);
    SpectralInfo info = spectral_radius(mat2(7, 0, 2, 3));
    CHECK(info.rho == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(info.simple_dominant);
}

TEST_CASE("rescaled family member matches the worked 2x2 values") {
    MatrixFamily f = rescale_family(transpose_family(illustrative_family()), 1.0 / kRoot8);
    const Matrix& a1 = f.members[0];
    CHECK(a1(0, 0) == doctest::Approx(1.1649).epsilon(5e-5));
    CHECK(a1(0, 1) == doctest::Approx(0.3328).epsilon(5e-5));
    CHECK(a1(1, 0) == 0.0);
    CHECK(a1(1, 1) == doctest::Approx(0.4992).epsilon(5e-5));
    CHECK(spectral_radius_only(a1) == doctest::Approx(1.1649).epsilon(5e-5));
    CHECK(f.rescale == doctest::Approx(1.0 / kRoot8));
}

TEST_CASE("degree-8 optimal product root matches its closed form") {
    MatrixFamily f = illustrative_family();
    ProductNode pi = materialize({1, 2, 1, 1, 2, 1, 1, 2}, f);
    const double root = std::pow(spectral_radius_only(pi.matrix), 1.0 / 8.0);
    CHECK(root == doctest::Approx(kRoot8).epsilon(1e-10));
    CHECK(root == doctest::Approx(6.009313489).epsilon(1e-9));
}

TEST_CASE("triangular 4x4 product root is exact") {
    MatrixFamily f = critical_family();
    ProductNode p = materialize({1, 1, 1, 2, 2, 2, 2}, f);
    CHECK(spectral_radius_only(p.matrix) == doctest::Approx(2187.0).epsilon(1e-12));
    CHECK(std::pow(spectral_radius_only(p.matrix), 1.0 / 7.0) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("extend_product") {
    MatrixFamily f = illustrative_family();

    SUBCASE("identity prefix extension yields the member itself") {
        ProductNode n = extend_product(identity_node(2), 2, f);
        CHECK(n.matrix == f.members[1]);
        CHECK(n.degree == 1);
        CHECK(n.word == std::vector<int>{2});
    }

    SUBCASE("squared rescaled member matches the worked values") {
        MatrixFamily fr = rescale_family(transpose_family(f), 1.0 / kRoot8);
        ProductNode n = extend_product(materialize({1}, fr), 1, fr);
        CHECK(n.matrix(0, 0) == doctest::Approx(1.3569).epsilon(5e-5));
        CHECK(n.matrix(0, 1) == doctest::Approx(0.5538).epsilon(5e-5));
        CHECK(n.matrix(1, 1) == doctest::Approx(0.2492).epsilon(5e-5));
    }

    SUBCASE("mixed product root after rescaling") {
        MatrixFamily fr = rescale_family(transpose_family(f), 1.0 / kRoot8);
        ProductNode n = materialize({1, 2}, fr);
        CHECK(std::pow(spectral_radius_only(n.matrix), 0.5) ==
              doctest::Approx(1.0108).epsilon(5e-5));
    }

    SUBCASE("index out of range") {
        CHECK_THROWS_AS(extend_product(identity_node(2), 3, f), InvalidInputError);
    }

    SUBCASE("overflow guard") {
        Matrix big(2, 2, 1e80);
        MatrixFamily bf = make_family({big});
        ProductNode n = materialize({1}, bf);
        CHECK_THROWS_AS(extend_product(n, 1, bf), OverflowError);
    }
}

TEST_CASE("extend_product equals brute-force left-to-right association exactly") {
    SplitMix64 rng(5);
    Matrix a(2, 2), b(2, 2);
    for (double& v : a.data()) v = static_cast<double>(rng.next() % 7);
    for (double& v : b.data()) v = static_cast<double>(rng.next() % 7);
    MatrixFamily f = make_family({a, b});
    for (int bits = 0; bits < (1 << 6); ++bits) {
        std::vector<int> word;
        for (int j = 0; j < 6; ++j) word.push_back(((bits >> j) & 1) + 1);
        Matrix direct = Matrix::identity(2);
        for (int i : word) direct = direct * f.members[static_cast<std::size_t>(i - 1)];
        ProductNode incremental = identity_node(2);
        for (int i : word) incremental = extend_product(incremental, i, f);
        CHECK(incremental.matrix == direct);
    }
}

TEST_CASE("rescale_family") {
    MatrixFamily f = illustrative_family();
    CHECK_THROWS_AS(rescale_family(f, 0.0), InvalidInputError);
    CHECK_THROWS_AS(rescale_family(f, -2.0), InvalidInputError);

    MatrixFamily same = rescale_family(f, 1.0);
    CHECK(same.members[0] == f.members[0]);

    MatrixFamily round = rescale_family(rescale_family(f, 2.0), 0.5);
    for (std::size_t k = 0; k < f.size(); ++k)
        for (std::size_t i = 0; i < f.dim * f.dim; ++i)
            CHECK(round.members[k].data()[i] ==
                  doctest::Approx(f.members[k].data()[i]).epsilon(1e-15));
}

TEST_CASE("transpose_family") {
    MatrixFamily f = illustrative_family();
    MatrixFamily t = transpose_family(f);
    CHECK(t.transposed);
    CHECK(t.members[0](0, 1) == f.members[0](1, 0));
    MatrixFamily tt = transpose_family(t);
    CHECK_FALSE(tt.transposed);
    CHECK(tt.members[0] == f.members[0]);

    Matrix sym(2, 2);
    sym(0, 0) = 1; sym(0, 1) = 2; sym(1, 0) = 2; sym(1, 1) = 5;
    MatrixFamily sf = transpose_family(make_family({sym}));
    CHECK(sf.members[0] == sym);
    CHECK(sf.transposed);
}

TEST_CASE("is_asymptotically_rank_one") {
    CHECK_FALSE(is_asymptotically_rank_one(critical_family().members[0]));  // double eigenvalue 5
    CHECK_FALSE(is_asymptotically_rank_one(Matrix::identity(2)));
    SplitMix64 rng(8);
    for (int t = 0; t < 10; ++t) {
        Matrix p(3, 3);
        for (double& v : p.data()) v = rng.next_positive();
        CHECK(is_asymptotically_rank_one(p));
    }
}

TEST_CASE("embedded_cone_constant") {
    CHECK(embedded_cone_constant(mat2(1, 2, 3, 4)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(embedded_cone_constant(mat2(1, 2, 1, 2)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(embedded_cone_constant(mat2(1, 10, 1, 1)) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK_THROWS_AS(embedded_cone_constant(mat2(1, 0, 2, 3)), InvalidInputError);
}

TEST_CASE("spectral radius properties on random nonnegative matrices") {
    SplitMix64 rng(21);
    for (int t = 0; t < 12; ++t) {
        const std::size_t d = 2 + (rng.next() % 4);
        Matrix a = random_nonneg(d, rng);
        const double rho = spectral_radius_only(a);

        // rho(A^k) = rho(A)^k
        Matrix p = a;
        for (int k = 2; k <= 5; ++k) {
            p = p * a;
            CHECK(spectral_radius_only(p) ==
                  doctest::Approx(std::pow(rho, k)).epsilon(1e-9));
        }

        // rho(alpha A) = alpha rho(A)
        CHECK(spectral_radius_only(a.scaled(3.25)) == doctest::Approx(3.25 * rho).epsilon(1e-12));

        // rho(AB) = rho(BA)
        Matrix b = random_nonneg(d, rng);
        CHECK(spectral_radius_only(a * b) ==
              doctest::Approx(spectral_radius_only(b * a)).epsilon(1e-9));

        // Perron iteration agrees with the QR spectrum
        auto perron = perron_iteration(a);
        REQUIRE(perron.has_value());
        double qr_rho = 0;
        for (auto [re, im] : eigenvalues(a)) qr_rho = std::max(qr_rho, std::hypot(re, im));
        CHECK(perron->rho == doctest::Approx(qr_rho).epsilon(1e-8));
    }
}

TEST_CASE("leading eigenvector satisfies the residual bound") {
    SplitMix64 rng(31);
    for (int t = 0; t < 8; ++t) {
        const std::size_t d = 2 + (rng.next() % 5);
        Matrix a = random_nonneg(d, rng);
        SpectralInfo info = spectral_radius(a);
        REQUIRE(info.leading_vector.size() == d);
        CHECK(norm_1(info.leading_vector) == doctest::Approx(1.0).epsilon(1e-12));
        Vector av = a.apply(info.leading_vector);
        double res = 0;
        for (std::size_t i = 0; i < d; ++i)
            res = std::max(res, std::abs(av[i] - info.rho * info.leading_vector[i]));
        CHECK(res <= 1e-8 * std::max(1.0, a.max_abs()));
        for (double v : info.leading_vector) CHECK(v >= -1e-12);
    }
}

TEST_CASE("invalid inputs are rejected") {
    Matrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectral_radius_only(bad), InvalidInputError);
    CHECK_THROWS_AS(make_family({bad}), InvalidInputError);
    CHECK_THROWS_AS(make_family({}), InvalidInputError);
    CHECK_THROWS_AS(make_family({Matrix(2, 2), Matrix(3, 3)}), InvalidInputError);
}
