#include "multinorm/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace multinorm {

namespace {

void fft_line(cplx* a, std::size_t n, std::size_t stride, const std::vector<cplx>& twiddle,
              bool inverse) {
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i * stride], a[j * stride]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx w = twiddle[k * step];
                if (inverse) w = std::conj(w);
                cplx u = a[(i + k) * stride];
                cplx v = a[(i + k + len / 2) * stride] * w;
                a[(i + k) * stride] = u + v;
                a[(i + k + len / 2) * stride] = u - v;
            }
    }
}

std::vector<cplx> make_twiddles(std::size_t n) {
    std::vector<cplx> t(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * std::numbers::pi * (double)k / (double)n;
        t[k] = cplx(std::cos(ang), std::sin(ang));
    }
    return t;
}

}  // namespace

void fft_axis(cplx* data, std::size_t n, std::size_t stride, std::size_t count_before,
              std::size_t count_after, bool inverse) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: length not a power of two");
    const auto twiddle = make_twiddles(n);
    for (std::size_t b = 0; b < count_before; ++b)
        for (std::size_t a = 0; a < count_after; ++a)
            fft_line(data + b * (n * stride) + a, n, stride, twiddle, inverse);
    if (inverse) {
        const double scale = 1.0 / (double)n;
        const std::size_t total = count_before * n * count_after;
        for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
    }
}

void fft_nd(std::vector<cplx>& data, const std::vector<std::size_t>& dims, bool inverse) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    if (data.size() != total) throw std::invalid_argument("fft_nd: size mismatch");
    // Row-major: axis d has stride = product of dims after it.
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
        std::size_t stride = 1;
        for (std::size_t d = axis + 1; d < dims.size(); ++d) stride *= dims[d];
        std::size_t before = 1;
        for (std::size_t d = 0; d < axis; ++d) before *= dims[d];
        fft_axis(data.data(), dims[axis], stride, before, stride, inverse);
    }
}

}  // namespace multinorm
