#include <doctest.h>

#include <cmath>

#include "subrad/antinorm.hpp"
#include "subrad/families.hpp"

using namespace subrad;

namespace {

const double kRoot8 = std::pow(4.0 * (213803.0 + std::sqrt(44666192953.0)), 1.0 / 8.0);

MatrixFamily worked_family() {
    return rescale_family(transpose_family(illustrative_family()), 1.0 / kRoot8);
}

Vector random_cone_vector(std::size_t d, SplitMix64& rng) {
    Vector v(d);
    for (double& e : v) e = rng.next_double();
    return v;
}

PolytopeAntinorm random_antinorm(std::size_t d, std::size_t p, SplitMix64& rng) {
    PolytopeAntinorm a;
    a.dim = d;
    for (std::size_t j = 0; j < p; ++j) a.vertices.push_back(random_cone_vector(d, rng));
    return a;
}

}  // namespace

TEST_CASE("eval_vector against the worked values") {
    PolytopeAntinorm id2 = identity_antinorm(2);
    const Vector z{0.3328, 0.4992};

    AntinormValue v = eval_vector(id2, z);
    CHECK(v.value == doctest::Approx(0.3328 + 0.4992).epsilon(1e-10));
    CHECK(v.value == doctest::Approx(0.8320).epsilon(1e-4));
    CHECK(v.c_min == doctest::Approx(1.0 / v.value).epsilon(1e-10));

    SUBCASE("vertex of a minimal set evaluates to one") {
        CHECK(eval_vector(id2, {1.0, 0.0}).value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("zero maps to zero via infeasibility") {
        AntinormValue z0 = eval_vector(id2, {0.0, 0.0});
        CHECK(z0.value == 0.0);
        CHECK(std::isinf(z0.c_min));
    }
    SUBCASE("positive homogeneity at the worked point") {
        AntinormValue doubled = eval_vector(id2, {2 * 0.3328, 2 * 0.4992});
        CHECK(doubled.value == doctest::Approx(2 * v.value).epsilon(1e-10));
        CHECK(doubled.value == doctest::Approx(1.6640).epsilon(1e-4));
    }
    SUBCASE("negative component is rejected") {
        CHECK_THROWS_AS(eval_vector(id2, {1.0, -0.1}), InvalidInputError);
    }
}

TEST_CASE("eval_matrix against the worked values") {
    MatrixFamily f = worked_family();
    PolytopeAntinorm id2 = identity_antinorm(2);

    AntinormValue v = eval_matrix(id2, f.members[0]);
    CHECK(v.value == doctest::Approx(0.8320).epsilon(1e-4));
    CHECK(v.argmin_vertex_index == 1);
    REQUIRE(v.candidate.size() == 2);
    CHECK(v.candidate[0] == doctest::Approx(0.3328).epsilon(1e-4));
    CHECK(v.candidate[1] == doctest::Approx(0.4992).epsilon(1e-4));

    SUBCASE("identity matrix on a minimal set") {
        CHECK(eval_matrix(id2, Matrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("six-vertex state from the worked degree-two trace") {
        // the vertex set reached after the first two refinement steps
        PolytopeAntinorm six;
        six.dim = 2;
        six.vertices = {{1, 0}, {0, 1}, {0.3328, 0.4992}, {0.5538, 0.2492},
                        {0.4478, 0.3497}, {0.2123, 0.6571}};
        Matrix a2sq = materialize({2, 2}, f).matrix;
        AntinormValue w = eval_matrix(six, a2sq);
        CHECK(w.value == doctest::Approx(1.1542).epsilon(1e-3));
        CHECK(w.candidate[0] == doctest::Approx(0.0613).epsilon(2e-2));
        CHECK(w.candidate[1] == doctest::Approx(1.0552).epsilon(2e-3));
    }
}

TEST_CASE("one_antinorm_matrix") {
    MatrixFamily crit = critical_family();
    CHECK(one_antinorm_matrix(crit.members[0]) == 3.0);
    CHECK(one_antinorm_matrix(crit.members[1]) == 1.0);
    CHECK(one_antinorm_matrix(Matrix::identity(4)) == 1.0);
    CHECK(one_antinorm_matrix(worked_family().members[0]) == doctest::Approx(0.8320).epsilon(1e-4));
    Matrix neg(2, 2);
    neg(0, 0) = -1;
    CHECK_THROWS_AS(one_antinorm_matrix(neg), InvalidInputError);
}

TEST_CASE("p_antinorm_vector") {
    CHECK(p_antinorm_vector(-kInf, {1.0, 2.0}) == 1.0);
    CHECK(p_antinorm_vector(1.0, {0.3328, 0.4992}) == doctest::Approx(0.8320).epsilon(1e-4));
    CHECK(p_antinorm_vector(0.5, {1.0, 1.0}) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p_antinorm_vector(-1.0, {1.0, 0.0}) == 0.0);  // boundary limit convention
    CHECK(p_antinorm_vector(-2.0, {1.0, 2.0}) ==
          doctest::Approx(std::pow(1.0 + 0.25, -0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(p_antinorm_vector(0.0, {1.0}), InvalidInputError);
    CHECK_THROWS_AS(p_antinorm_vector(2.0, {1.0}), InvalidInputError);
}

TEST_CASE("try_insert_vertex follows the worked accept/reject pair") {
    MatrixFamily f = worked_family();
    PolytopeAntinorm a = identity_antinorm(2);

    AntinormValue first = eval_matrix(a, f.members[0]);
    auto [with_z, accepted] = try_insert_vertex(a, first.candidate);
    CHECK(accepted);
    CHECK(with_z.vertex_count() == 3);

    AntinormValue second = eval_matrix(with_z, f.members[1]);
    CHECK(second.value == doctest::Approx(1.0528).epsilon(1e-4));
    auto [unchanged, rejected_accept] = try_insert_vertex(with_z, second.candidate);
    CHECK_FALSE(rejected_accept);
    CHECK(unchanged.vertex_count() == 3);

    SUBCASE("an existing vertex re-inserts, then pruning drops the duplicate") {
        auto [dup, ok] = try_insert_vertex(with_z, with_z.vertices[2]);
        CHECK(ok);
        CHECK(dup.vertex_count() == 4);
        PolytopeAntinorm pruned = prune(dup);
        CHECK(pruned.vertex_count() == 3);
    }

    CHECK_THROWS_AS(try_insert_vertex(a, Vector{0.0, 0.0}), InvalidInputError);
}

TEST_CASE("prune removes dominated and duplicate vertices") {
    PolytopeAntinorm a;
    a.dim = 2;
    a.vertices = {{1, 0}, {0, 1}, {2, 2}};
    PolytopeAntinorm p = prune(a);
    REQUIRE(p.vertex_count() == 2);
    CHECK(p.vertices[0] == Vector{1, 0});
    CHECK(p.vertices[1] == Vector{0, 1});

    SUBCASE("pruned minimal vertices evaluate to one") {
        for (const Vector& v : p.vertices)
            CHECK(eval_vector(p, v).value == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("rescaled_eigenvector") {
    PolytopeAntinorm id2 = identity_antinorm(2);
    SUBCASE("homogeneity gives a(w) = 1/theta") {
        Vector v{1.2, 0.8};  // a(v) = 2
        auto w = rescaled_eigenvector(id2, v, 1.005);
        REQUIRE(w.has_value());
        CHECK((*w)[0] == doctest::Approx(1.2 / 2.01).epsilon(1e-12));
        CHECK(eval_vector(id2, *w).value == doctest::Approx(1.0 / 1.005).epsilon(1e-9));
    }
    SUBCASE("a vertex rescales by exactly theta") {
        auto w = rescaled_eigenvector(id2, {1.0, 0.0}, 1.005);
        REQUIRE(w.has_value());
        CHECK((*w)[0] == doctest::Approx(1.0 / 1.005).epsilon(1e-12));
    }
    SUBCASE("vector invisible to the antinorm is rejected") {
        PolytopeAntinorm single = single_vertex_antinorm({1.0, 0.0});
        CHECK_FALSE(rescaled_eigenvector(single, {0.0, 1.0}, 1.005).has_value());
    }
}

namespace {

// independent 2-d gauge of conv(V) + R^2_+: the optimum of the defining
// max-min sits on a vertex or an edge of the weight simplex, so both cases
// can be enumerated directly without linear programming
double gauge_2d(const std::vector<Vector>& vs, const Vector& z) {
    double best = 0;
    for (const Vector& v : vs) {
        double m = kInf;
        for (int i = 0; i < 2; ++i)
            if (v[i] > 0) m = std::min(m, z[i] / v[i]);
        if (m != kInf) best = std::max(best, m);
    }
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            const Vector &u = vs[i], &w = vs[j];
            const double a = z[0] * (u[1] - w[1]) - z[1] * (u[0] - w[0]);
            const double b = z[0] * w[1] - z[1] * w[0];
            if (std::abs(a) < 1e-300) continue;
            const double t = -b / a;
            if (t <= 0 || t >= 1) continue;
            const double mix = t * u[0] + (1 - t) * w[0];
            if (mix > 0) best = std::max(best, z[0] / mix);
        }
    return best;
}

}  // namespace

TEST_CASE("LP evaluation agrees with the direct planar gauge") {
    SplitMix64 rng(2718);
    for (int t = 0; t < 40; ++t) {
        PolytopeAntinorm a = random_antinorm(2, 2 + (rng.next() % 6), rng);
        for (int s = 0; s < 10; ++s) {
            Vector z{rng.next_double() * 3, rng.next_double() * 3};
            const double lp = eval_vector(a, z).value;
            const double direct = gauge_2d(a.vertices, z);
            CHECK(lp == doctest::Approx(direct).epsilon(1e-10));
        }
    }
}

TEST_CASE("antinorm properties on random instances") {
    SplitMix64 rng(17);
    for (int t = 0; t < 8; ++t) {
        const std::size_t d = 2 + (rng.next() % 3);
        PolytopeAntinorm a = random_antinorm(d, 3 + (rng.next() % 4), rng);

        SUBCASE("") {}  // keep doctest from merging subcase names
        // positive homogeneity
        Vector z = random_cone_vector(d, rng);
        const double lambda = rng.next_double() * 10 + 1e-3;
        Vector lz = z;
        for (double& e : lz) e *= lambda;
        const double az = eval_vector(a, z).value;
        CHECK(eval_vector(a, lz).value == doctest::Approx(lambda * az).epsilon(1e-8));

        // superadditivity
        Vector y = random_cone_vector(d, rng);
        Vector sum = z;
        for (std::size_t i = 0; i < d; ++i) sum[i] += y[i];
        const double ay = eval_vector(a, y).value;
        CHECK(eval_vector(a, sum).value >= az + ay - 1e-8 * (az + ay));

        // supermultiplicativity of the induced matrix antinorm
        Matrix ma(d, d), mb(d, d);
        for (double& e : ma.data()) e = rng.next_double();
        for (double& e : mb.data()) e = rng.next_double();
        const double aa = eval_matrix(a, ma).value;
        const double ab = eval_matrix(a, mb).value;
        CHECK(eval_matrix(a, ma * mb).value >= aa * ab - 1e-8);

        // closed-form agreement for the identity vertex set
        PolytopeAntinorm id_d = identity_antinorm(d);
        CHECK(eval_matrix(id_d, ma).value ==
              doctest::Approx(one_antinorm_matrix(ma)).epsilon(1e-9));

        // insertion monotonicity on samples
        Vector cand = random_cone_vector(d, rng);
        auto [bigger, ok] = try_insert_vertex(a, cand);
        if (ok) {
            for (int s = 0; s < 4; ++s) {
                Vector x = random_cone_vector(d, rng);
                CHECK(eval_vector(bigger, x).value >= eval_vector(a, x).value - 1e-9);
            }
        }

        // pruning value-invariance on samples
        PolytopeAntinorm pruned = prune(a);
        for (int s = 0; s < 4; ++s) {
            Vector x = random_cone_vector(d, rng);
            const double before = eval_vector(a, x).value;
            const double after = eval_vector(pruned, x).value;
            CHECK(std::abs(before - after) <= 10 * a.tol * std::max(1.0, before));
        }
        for (const Vector& v : pruned.vertices)
            CHECK(eval_vector(pruned, v).value == doctest::Approx(1.0).epsilon(10 * a.tol + 1e-9));
    }
}
