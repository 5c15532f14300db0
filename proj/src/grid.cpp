#include "multinorm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multinorm {

std::size_t GridGeometry::total() const {
    std::size_t t = 1;
    for (int h = 0; h < rank(); ++h) t *= n(h);
    return t;
}

double GridGeometry::cell_volume() const {
    double v = 1.0;
    for (int h = 0; h < rank(); ++h) v *= spacing(h);
    return v;
}

double GridGeometry::coord(int h, std::size_t idx) const {
    const std::size_t nh = n(h);
    const long long k = idx < nh / 2 ? (long long)idx : (long long)idx - (long long)nh;
    return (double)k * spacing(h);
}

double GridGeometry::freq(int h, std::size_t idx) const {
    const std::size_t nh = n(h);
    const long long m = idx < nh / 2 ? (long long)idx : (long long)idx - (long long)nh;
    return (double)m * std::ldexp(1.0, -period_log2[h]);
}

std::vector<std::size_t> GridGeometry::dims() const {
    std::vector<std::size_t> d(rank());
    for (int h = 0; h < rank(); ++h) d[h] = n(h);
    return d;
}

GridGeometry GridGeometry::uniform(int rank, int log2n_, int period_log2_) {
    GridGeometry g;
    g.log2n.assign(rank, log2n_);
    g.period_log2.assign(rank, period_log2_);
    return g;
}

void for_each_index(const GridGeometry& g,
                    const std::function<void(std::size_t, const std::vector<std::size_t>&)>& fn) {
    const int r = g.rank();
    std::vector<std::size_t> idx(r, 0);
    const std::size_t total = g.total();
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(flat, idx);
        for (int h = r - 1; h >= 0; --h) {
            if (++idx[h] < g.n(h)) break;
            idx[h] = 0;
        }
    }
}

SampledFunction::SampledFunction(GridGeometry g, std::vector<cplx> samples)
    : geom_(std::move(g)), samples_(std::move(samples)) {
    if (samples_.size() != geom_.total()) throw std::invalid_argument("sampled function: size");
}

SampledFunction SampledFunction::zeros(const GridGeometry& g) {
    return SampledFunction(g, std::vector<cplx>(g.total(), cplx(0)));
}

SampledFunction SampledFunction::from_symbol(const GridGeometry& g, Symbol symbol) {
    std::vector<cplx> spec(g.total());
    std::vector<double> xi(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) xi[h] = g.freq(h, idx[h]);
        spec[flat] = symbol(xi);
    });
    SampledFunction f = from_spectrum(g, std::move(spec));
    f.symbol_ = std::make_shared<const Symbol>(std::move(symbol));
    return f;
}

SampledFunction SampledFunction::from_space(
    const GridGeometry& g, const std::function<cplx(const std::vector<double>&)>& fn) {
    std::vector<cplx> v(g.total());
    std::vector<double> x(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) x[h] = g.coord(h, idx[h]);
        v[flat] = fn(x);
    });
    return SampledFunction(g, std::move(v));
}

std::vector<cplx> SampledFunction::spectrum() const {
    std::vector<cplx> spec = samples_;
    fft_nd(spec, geom_.dims(), /*inverse=*/false);
    const double scale = geom_.cell_volume();
    for (auto& v : spec) v *= scale;
    return spec;
}

SampledFunction SampledFunction::from_spectrum(const GridGeometry& g, std::vector<cplx> spec) {
    fft_nd(spec, g.dims(), /*inverse=*/true);
    const double scale = 1.0 / g.cell_volume();
    for (auto& v : spec) v *= scale;
    return SampledFunction(g, std::move(spec));
}

double SampledFunction::norm_l1() const {
    double s = 0;
    for (const auto& v : samples_) s += std::abs(v);
    return s * geom_.cell_volume();
}

double SampledFunction::norm_l2() const {
    double s = 0;
    for (const auto& v : samples_) s += std::norm(v);
    return std::sqrt(s * geom_.cell_volume());
}

double SampledFunction::max_abs() const {
    double m = 0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
}

cplx SampledFunction::integral() const {
    cplx s(0);
    for (const auto& v : samples_) s += v;
    return s * geom_.cell_volume();
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
    if (!(geom_ == o.geom_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
    symbol_.reset();
    return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& o) {
    if (!(geom_ == o.geom_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
    symbol_.reset();
    return *this;
}

SampledFunction& SampledFunction::operator*=(double c) {
    for (auto& v : samples_) v *= c;
    symbol_.reset();
    return *this;
}

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
    if (!(f.geometry() == g.geometry())) throw std::invalid_argument("convolve: grid mismatch");
    auto a = f.samples();
    auto b = g.samples();
    const auto dims = f.geometry().dims();
    fft_nd(a, dims, false);
    fft_nd(b, dims, false);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    fft_nd(a, dims, true);
    const double scale = f.geometry().cell_volume();
    for (auto& v : a) v *= scale;
    return SampledFunction(f.geometry(), std::move(a));
}

SampledFunction apply_symbol(const SampledFunction& f, const Symbol& m) {
    const auto& g = f.geometry();
    auto spec = f.samples();
    fft_nd(spec, g.dims(), false);
    std::vector<double> xi(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) xi[h] = g.freq(h, idx[h]);
        spec[flat] *= m(xi);
    });
    fft_nd(spec, g.dims(), true);
    return SampledFunction(g, std::move(spec));
}

double quadrature_norm(const SampledFunction& f, int p) {
    if (p == 1) return f.norm_l1();
    if (p == 2) return f.norm_l2();
    throw std::invalid_argument("quadrature_norm: p must be 1 or 2");
}

double block_moment(const Structure& s, const SampledFunction& f, int factor,
                    const std::vector<int>& alpha) {
    const auto& g = f.geometry();
    const auto& coords = s.exponents().blocks[factor];
    // Accumulate the in-block integral per out-of-block slice.
    std::size_t out_total = 1;
    std::vector<int> out_coords;
    for (int h = 0; h < g.rank(); ++h)
        if (std::find(coords.begin(), coords.end(), h) == coords.end()) {
            out_coords.push_back(h);
            out_total *= g.n(h);
        }
    std::vector<cplx> acc(out_total, cplx(0));
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        double w = 1.0;
        for (std::size_t k = 0; k < coords.size(); ++k) {
            const double x = g.coord(coords[k], idx[coords[k]]);
            w *= std::pow(x, alpha.empty() ? 0 : alpha[coords[k]]) * g.spacing(coords[k]);
        }
        std::size_t key = 0;
        for (int h : out_coords) key = key * g.n(h) + idx[h];
        acc[key] += w * f.samples()[flat];
    });
    double m = 0;
    for (const auto& v : acc) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Integer log2 of the index scaling factor 2^{l * lambda_h * (dual scale)};
// nullopt when the exponent is not a nonnegative integer.
std::optional<long long> integer_exponent(const Rational& r) {
    if (!r.is_integer() || r.num() < 0) return std::nullopt;
    return r.num();
}

void check_band(const SampledFunction& f, const std::vector<long long>& shift_log2,
                double tol, const char* what) {
    // Spectral mass beyond Nyquist/2^shift must be negligible.
    auto spec = f.samples();
    fft_nd(spec, f.geometry().dims(), false);
    const auto& g = f.geometry();
    double inside = 0, outside = 0;
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        bool ok = true;
        for (int h = 0; h < g.rank(); ++h) {
            const std::size_t nh = g.n(h);
            const long long m = idx[h] < nh / 2 ? (long long)idx[h] : (long long)idx[h] - (long long)nh;
            const long long cap = (long long)(nh >> 1) >> shift_log2[h];
            if (std::llabs(m) > cap - 1) ok = false;
        }
        (ok ? inside : outside) += std::norm(spec[flat]);
    });
    if (outside > tol * (inside + outside) && inside + outside > 0)
        throw std::domain_error(std::string(what) + ": spectrum exceeds the band after rescaling");
}

SampledFunction decimate(const SampledFunction& f, const std::vector<long long>& shift_log2,
                         double amplitude) {
    const auto& g = f.geometry();
    std::vector<cplx> out(g.total());
    std::vector<std::size_t> src(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        std::size_t flat_src = 0;
        for (int h = 0; h < g.rank(); ++h) {
            const std::size_t nh = g.n(h);
            const std::size_t scaled = (idx[h] << shift_log2[h]) & (nh - 1);
            flat_src = flat_src * nh + scaled;
        }
        out[flat] = amplitude * f.samples()[flat_src];
    });
    return SampledFunction(g, std::move(out));
}

}  // namespace

SampledFunction rescale_tensor(const Structure& s, const SampledFunction& f, const Lattice& L,
                               const RescaleOptions& opt) {
    const auto& g = f.geometry();
    Rational logamp(0);
    for (int j = 0; j < s.n(); ++j) logamp += Rational(L[j]) * s.q(j);
    if (f.has_symbol()) {
        // Exact: the transform of the rescaled function is the symbol at the
        // block-dilated frequencies.
        const Symbol base = f.symbol();
        std::vector<double> scale(g.rank());
        for (int h = 0; h < g.rank(); ++h) {
            const int j = s.factor_of(h);
            scale[h] = std::pow(2.0, -(double)L[j] * s.exponents().lambda[h].to_double());
        }
        Symbol rescaled = [base, scale](const std::vector<double>& xi) {
            std::vector<double> y(xi.size());
            for (std::size_t h = 0; h < xi.size(); ++h) y[h] = xi[h] * scale[h];
            return base(y);
        };
        return SampledFunction::from_symbol(g, std::move(rescaled));
    }
    std::vector<long long> shift(g.rank());
    for (int h = 0; h < g.rank(); ++h) {
        const int j = s.factor_of(h);
        auto e = integer_exponent(Rational(L[j]) * s.exponents().lambda[h]);
        if (!e)
            throw std::invalid_argument(
                "rescale_tensor: non-integral index scaling; use symbol-backed data");
        shift[h] = *e;
    }
    check_band(f, shift, opt.nyquist_tail_tol, "rescale_tensor");
    return decimate(f, shift, std::pow(2.0, logamp.to_double()));
}

SampledFunction rescale_hat(const Structure& s, const SampledFunction& f, int i, long long ell,
                            const RescaleOptions& opt) {
    const auto& g = f.geometry();
    if (f.has_symbol()) {
        const Symbol base = f.symbol();
        std::vector<double> scale(g.rank());
        for (int h = 0; h < g.rank(); ++h)
            scale[h] = std::pow(2.0, -(double)ell * s.coord_exponent(i, h, /*dual=*/true));
        Symbol rescaled = [base, scale](const std::vector<double>& xi) {
            std::vector<double> y(xi.size());
            for (std::size_t h = 0; h < xi.size(); ++h) y[h] = xi[h] * scale[h];
            return base(y);
        };
        return SampledFunction::from_symbol(g, std::move(rescaled));
    }
    std::vector<long long> shift(g.rank());
    for (int h = 0; h < g.rank(); ++h) {
        const int j = s.factor_of(h);
        auto e = integer_exponent(Rational(ell) * s.exponents().lambda[h] * s.e(j, i));
        if (!e)
            throw std::invalid_argument(
                "rescale_hat: non-integral index scaling; use symbol-backed data");
        shift[h] = *e;
    }
    check_band(f, shift, opt.nyquist_tail_tol, "rescale_hat");
    const double amplitude = std::pow(2.0, (double)ell * s.Qhat(i).to_double());
    return decimate(f, shift, amplitude);
}

}  // namespace multinorm
