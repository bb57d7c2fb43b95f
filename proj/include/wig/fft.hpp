#pragma once

#include <vector>

#include "wig/types.hpp"

namespace wig {

// Centered DFT along one axis of a row-major array:
//   out[k] = scale * sum_j in[j] exp(sign * 2 pi i (k - m/2)(j - m/2) / m)
// with m = dims[axis] (even). In place.
void centered_dft_axis(std::vector<cplx>& data, const std::vector<int>& dims, int axis, int sign,
                       double scale);

// Same on a contiguous 1-D buffer.
void centered_dft(cplx* data, int m, int sign, double scale);

}  // namespace wig
