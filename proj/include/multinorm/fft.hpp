#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace multinorm {

using cplx = std::complex<double>;

// In-place iterative radix-2 FFT along one axis of a row-major array.
// Lengths must be powers of two.  The inverse applies the 1/n factor.
void fft_axis(cplx* data, std::size_t n, std::size_t stride, std::size_t count_before,
              std::size_t count_after, bool inverse);

// Full multi-dimensional transform, one pass per axis.
void fft_nd(std::vector<cplx>& data, const std::vector<std::size_t>& dims, bool inverse);

}  // namespace multinorm
