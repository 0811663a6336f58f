#pragma once

#include "subrad/matrix_core.hpp"

namespace subrad {

/// The two (r-1)x(r-1) 0/1 matrices whose joint spectral characteristics
/// control the growth of binary partition counts; r must be odd and >= 3.
MatrixFamily euler_family(int r);

/// Fixed 5x5 pair behind the odd-coefficient density of the Pascal rhombus.
MatrixFamily pascal_rhombus_family();

/// 2x2 pair with a known degree-8 optimal product; the standard worked example.
MatrixFamily illustrative_family();

/// 4x4 upper-triangular pair with a non-simple leading eigenvalue; the case
/// where a fixed 1-antinorm gets stuck.
MatrixFamily critical_family();

/// m random d x d matrices. Each entry is nonzero with probability `density`;
/// nonzero values are uniform in (0,1). Stream order (SplitMix64 from `seed`):
/// matrices in order, entries row-major. For density < 1 each entry consumes
/// one draw for the sparsity decision plus, when nonzero, one for the value;
/// for density = 1 the sparsity draw is skipped and every entry is positive.
MatrixFamily random_family(std::size_t d, std::size_t m, double density, std::uint64_t seed);

}  // namespace subrad
