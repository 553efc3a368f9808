#pragma once

#include <cstdint>
#include <vector>

#include "eulershape/complex.hpp"
#include "eulershape/grid.hpp"

namespace eulershape {

/// Serial brute-force Euler characteristic curve: for each grid value t,
/// recount the cells whose vertices all have height <= t along v. O(m * cells)
/// instead of the sorted lower-star sweep, with no shared bookkeeping, so it
/// doubles as an independent check and a benchmark baseline.
std::vector<std::int32_t> brute_force_ecc(const FlatComplex& k, Vec2 v,
                                          const FiltrationGrid& grid);

/// chi of the single sublevel set K cap {x . v <= t}, recounted from scratch.
std::int32_t brute_force_chi_at(const FlatComplex& k, Vec2 v, double t);

}  // namespace eulershape
