#include <doctest.h>

#include <cmath>
#include <cstring>

#include "subrad/families.hpp"

using namespace subrad;

TEST_CASE("euler family") {
    SUBCASE("r = 3 closed form") {
        MatrixFamily f = euler_family(3);
        REQUIRE(f.dim == 2);
        CHECK(f.members[0].data() == std::vector<double>{1, 1, 0, 1});
        CHECK(f.members[1].data() == std::vector<double>{1, 0, 1, 1});
    }
    SUBCASE("r = 7 shape and band structure") {
        MatrixFamily f = euler_family(7);
        REQUIRE(f.dim == 6);
        const double max_row = std::ceil((7 + 1) / 2.0);
        for (const Matrix& m : f.members) {
            for (double v : m.data()) CHECK((v == 0.0 || v == 1.0));
            for (std::size_t i = 0; i < 6; ++i) {
                double row_sum = 0;
                for (std::size_t j = 0; j < 6; ++j) row_sum += m(i, j);
                CHECK(row_sum <= max_row);
            }
        }
        // every band position is covered by at least one member
        for (std::size_t i = 1; i <= 6; ++i)
            for (std::size_t j = 1; j <= 6; ++j) {
                const bool in_union = f.members[0](i - 1, j - 1) + f.members[1](i - 1, j - 1) >= 1;
                const bool band = (static_cast<long>(i) + 0 <= 2 * static_cast<long>(j)) &&
                                  (2 * static_cast<long>(j) <= static_cast<long>(i) + 7);
                if (band) CHECK(in_union);
            }
    }
    SUBCASE("even or small r rejected") {
        CHECK_THROWS_AS(euler_family(4), InvalidInputError);
        CHECK_THROWS_AS(euler_family(1), InvalidInputError);
    }
}

TEST_CASE("pascal rhombus family constants") {
    MatrixFamily f = pascal_rhombus_family();
    REQUIRE(f.dim == 5);
    CHECK(f.members[0].data() == std::vector<double>{0, 1, 0, 0, 0, 1, 0, 2, 0, 0, 0, 0, 0, 0, 0,
                                                     0, 1, 0, 0, 1, 0, 0, 0, 2, 1});
    CHECK(f.members[1].data() == std::vector<double>{1, 0, 2, 0, 0, 0, 0, 0, 2, 1, 1, 1, 0, 0, 0,
                                                     0, 0, 0, 0, 0, 0, 1, 0, 0, 0});
    for (const Matrix& m : f.members)
        for (double v : m.data()) CHECK((v == 0 || v == 1 || v == 2));
    // the maximal growth rate of this pair is 2, attained by the first member
    CHECK(spectral_radius_only(f.members[0]) == doctest::Approx(2.0).epsilon(1e-12));
    // the minimal growth rate, known from the degree-6 optimal product
    const double lsr = std::pow(spectral_radius_only(materialize({1, 1, 1, 2, 2, 2}, f).matrix), 1.0 / 6.0);
    CHECK(lsr == doctest::Approx(1.6376).epsilon(1e-4));
}

TEST_CASE("illustrative and critical family constants") {
    MatrixFamily f = illustrative_family();
    CHECK(f.members[0].data() == std::vector<double>{7, 0, 2, 3});
    CHECK(f.members[1].data() == std::vector<double>{2, 4, 0, 8});

    MatrixFamily c = critical_family();
    CHECK(c.members[0].data() ==
          std::vector<double>{5, 1, 0, 0, 0, 5, 2, 0, 0, 0, 3, 1, 0, 0, 0, 2});
    CHECK(c.members[1].data() ==
          std::vector<double>{1, 2, 3, 4, 0, 2, 5, 6, 0, 0, 3, 7, 0, 0, 0, 4});
}

TEST_CASE("random family") {
    SUBCASE("density one means strictly positive") {
        MatrixFamily f = random_family(6, 3, 1.0, 99);
        for (const Matrix& m : f.members)
            for (double v : m.data()) CHECK(v > 0.0);
    }
    SUBCASE("same seed reproduces bit-exactly") {
        MatrixFamily a = random_family(5, 2, 0.4, 1234567);
        MatrixFamily b = random_family(5, 2, 0.4, 1234567);
        for (std::size_t k = 0; k < a.size(); ++k) {
            REQUIRE(a.members[k].data().size() == b.members[k].data().size());
            CHECK(std::memcmp(a.members[k].data().data(), b.members[k].data().data(),
                              a.members[k].data().size() * sizeof(double)) == 0);
        }
    }
    SUBCASE("different seeds differ") {
        MatrixFamily a = random_family(4, 2, 1.0, 1);
        MatrixFamily b = random_family(4, 2, 1.0, 2);
        CHECK(a.members[0].data() != b.members[0].data());
    }
    SUBCASE("sparsity roughly follows the density") {
        MatrixFamily f = random_family(40, 1, 0.25, 31);
        std::size_t nz = 0;
        for (double v : f.members[0].data()) nz += v != 0.0;
        const double frac = static_cast<double>(nz) / (40.0 * 40.0);
        CHECK(frac > 0.18);
        CHECK(frac < 0.32);
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(random_family(0, 1, 1.0, 1), InvalidInputError);
        CHECK_THROWS_AS(random_family(2, 2, 0.0, 1), InvalidInputError);
        CHECK_THROWS_AS(random_family(2, 2, 1.5, 1), InvalidInputError);
    }
}
