#include "subrad/families.hpp"

namespace subrad {

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    Matrix m(n, rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

MatrixFamily euler_family(int r) {
    if (r < 3 || r % 2 == 0)
        throw InvalidInputError("euler family requires an odd r >= 3");
    const std::size_t d = static_cast<std::size_t>(r - 1);
    std::vector<Matrix> members;
    for (int s = 1; s <= 2; ++s) {
        Matrix a(d, d, 0.0);
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t j = 1; j <= d; ++j) {
                const long lhs = static_cast<long>(i) + 2 - s;
                const long rhs = static_cast<long>(i) + r - s + 1;
                const long mid = 2 * static_cast<long>(j);
                if (lhs <= mid && mid <= rhs) a(i - 1, j - 1) = 1.0;
            }
        members.push_back(std::move(a));
    }
    return make_family(std::move(members), {"A1", "A2"});
}

MatrixFamily pascal_rhombus_family() {
    Matrix a1 = from_rows({{0, 1, 0, 0, 0},
                           {1, 0, 2, 0, 0},
                           {0, 0, 0, 0, 0},
                           {0, 1, 0, 0, 1},
                           {0, 0, 0, 2, 1}});
    Matrix a2 = from_rows({{1, 0, 2, 0, 0},
                           {0, 0, 0, 2, 1},
                           {1, 1, 0, 0, 0},
                           {0, 0, 0, 0, 0},
                           {0, 1, 0, 0, 0}});
    return make_family({a1, a2}, {"A1", "A2"});
}

MatrixFamily illustrative_family() {
    Matrix a1 = from_rows({{7, 0}, {2, 3}});
    Matrix a2 = from_rows({{2, 4}, {0, 8}});
    return make_family({a1, a2}, {"A1", "A2"});
}

MatrixFamily critical_family() {
    Matrix a1 = from_rows({{5, 1, 0, 0},
                           {0, 5, 2, 0},
                           {0, 0, 3, 1},
                           {0, 0, 0, 2}});
    Matrix a2 = from_rows({{1, 2, 3, 4},
                           {0, 2, 5, 6},
                           {0, 0, 3, 7},
                           {0, 0, 0, 4}});
    return make_family({a1, a2}, {"A1", "A2"});
}

MatrixFamily random_family(std::size_t d, std::size_t m, double density, std::uint64_t seed) {
    if (d < 1 || m < 1) throw InvalidInputError("random family requires d >= 1 and m >= 1");
    if (!(density > 0.0) || density > 1.0)
        throw InvalidInputError("density must lie in (0, 1]");
    SplitMix64 rng(seed);
    std::vector<Matrix> members;
    members.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        Matrix a(d, d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                if (density >= 1.0) {
                    a(i, j) = rng.next_positive();
                } else if (rng.next_double() < density) {
                    a(i, j) = rng.next_positive();
                }
            }
        members.push_back(std::move(a));
    }
    std::vector<std::string> labels;
    for (std::size_t k = 1; k <= m; ++k) labels.push_back("A" + std::to_string(k));
    return make_family(std::move(members), std::move(labels));
}

}  // namespace subrad
