#pragma once

#include <vector>

#include "chanest/types.hpp"

namespace chanest {

/**
 * Linear-interpolation operator from samples at src positions to dst
 * positions. src must be ascending; dst positions outside [src.front(),
 * src.back()] clamp to the nearest end (hold extrapolation). Row d of the
 * result holds the weights that produce the value at dst[d].
 */
mat_t interp_matrix(const std::vector<scalar_t>& src, const std::vector<scalar_t>& dst);

/**
 * Bilinear image-resize operator along one axis (corner-aligned): n_in
 * samples at 0..n_in-1 resampled to n_out positions spanning the same range.
 */
mat_t resize_matrix(int n_in, int n_out);

/** rows * x * cols^T for a complex grid, using two real operators. */
cmat_t apply_separable(const mat_t& rows, const cmat_t& x, const mat_t& cols);

}  // namespace chanest
