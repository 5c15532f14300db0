#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "multinorm/core.hpp"
#include "multinorm/fft.hpp"

namespace multinorm {

// Closed-form frequency-side description of a function; evaluated at grid
// frequencies when materializing.
using Symbol = std::function<cplx(const std::vector<double>& xi)>;

using Lattice = std::vector<long long>;

// Periodic anisotropic sampling grid: coordinate h has N_h = 2^{log2n[h]}
// samples over a period 2^{period_log2[h]}, centered at the origin.
struct GridGeometry {
    std::vector<int> log2n;
    std::vector<int> period_log2;

    int rank() const { return (int)log2n.size(); }
    std::size_t n(int h) const { return std::size_t(1) << log2n[h]; }
    std::size_t total() const;
    double spacing(int h) const { return std::ldexp(1.0, period_log2[h] - log2n[h]); }
    double cell_volume() const;
    // Physical coordinate of a sample index along axis h (symmetric range).
    double coord(int h, std::size_t idx) const;
    // Frequency of a spectral index along axis h.
    double freq(int h, std::size_t idx) const;
    std::vector<std::size_t> dims() const;
    bool operator==(const GridGeometry& o) const {
        return log2n == o.log2n && period_log2 == o.period_log2;
    }

    static GridGeometry uniform(int rank, int log2n_, int period_log2_);
};

// A complex-valued function sampled on the grid.  Values are immutable by
// convention after construction; every operation returns a fresh function.
class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(GridGeometry g, std::vector<cplx> samples);
    static SampledFunction zeros(const GridGeometry& g);
    // Materialize from a closed-form Fourier transform sampled at grid
    // frequencies (kept for later exact rescaling).
    static SampledFunction from_symbol(const GridGeometry& g, Symbol symbol);
    // Sample a closed-form space-side function directly.
    static SampledFunction from_space(const GridGeometry& g,
                                      const std::function<cplx(const std::vector<double>&)>& f);

    const GridGeometry& geometry() const { return geom_; }
    const std::vector<cplx>& samples() const { return samples_; }
    std::vector<cplx>& mutable_samples() { return samples_; }
    bool has_symbol() const { return symbol_ != nullptr; }
    const Symbol& symbol() const { return *symbol_; }

    // Frequency-side values at grid frequencies with continuum normalization:
    // spectrum[m] ~ integral f(x) e^{-2 pi i x.xi_m} dx.
    std::vector<cplx> spectrum() const;
    static SampledFunction from_spectrum(const GridGeometry& g, std::vector<cplx> spec);

    double norm_l1() const;
    double norm_l2() const;
    double max_abs() const;
    cplx integral() const;

    SampledFunction& operator+=(const SampledFunction& o);
    SampledFunction& operator-=(const SampledFunction& o);
    SampledFunction& operator*=(double c);

    friend SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
    friend SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
    friend SampledFunction operator*(double c, SampledFunction a) { return a *= c; }

private:
    GridGeometry geom_;
    std::vector<cplx> samples_;
    std::shared_ptr<const Symbol> symbol_;
};

// Periodic convolution via the transform; continuum normalization.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);

// Pointwise multiplication of the spectrum by a symbol (i.e. convolution with
// the symbol's inverse transform) without materializing the kernel.
SampledFunction apply_symbol(const SampledFunction& f, const Symbol& m);

// Riemann-sum norms and block moments.
double quadrature_norm(const SampledFunction& f, int p);
// Max modulus over the out-of-block sample slices of the in-block moment
// integral of x^alpha f.
double block_moment(const Structure& s, const SampledFunction& f, int factor,
                    const std::vector<int>& alpha);

struct RescaleOptions {
    double nyquist_tail_tol = 1e-9;  // relative spectral mass allowed beyond the band
};

// f^(-L): frequency-exact for symbol-backed data, index decimation otherwise
// (requires integral power-of-two coordinate scalings and a band-limited
// spectrum; violations are reported, never aliased silently).
SampledFunction rescale_tensor(const Structure& s, const SampledFunction& f, const Lattice& L,
                               const RescaleOptions& opt = {});

// f^(-l)_i relative to the dual dilations of factor i.
SampledFunction rescale_hat(const Structure& s, const SampledFunction& f, int i, long long ell,
                            const RescaleOptions& opt = {});

// Iteration helper: visits every flat index with its per-axis indices.
void for_each_index(const GridGeometry& g,
                    const std::function<void(std::size_t flat, const std::vector<std::size_t>&)>& fn);

}  // namespace multinorm
