#include "multinorm/calderon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace multinorm {

namespace rychkov {

std::vector<cplx> mu(const std::vector<cplx>& nu_l, const std::vector<cplx>* nu_prev) {
    std::vector<cplx> out = nu_l;
    if (nu_prev)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] -= (*nu_prev)[k];
    return out;
}

std::vector<cplx> nu_tilde(const std::vector<cplx>& a, int M) {
    std::vector<cplx> sum(a.size(), cplx(0)), pw(a.size(), cplx(1));
    for (int k = 0; k < M; ++k) {
        for (std::size_t j = 0; j < a.size(); ++j) sum[j] += pw[j];
        for (std::size_t j = 0; j < a.size(); ++j) pw[j] *= cplx(1) - a[j] * a[j];
    }
    for (std::size_t j = 0; j < a.size(); ++j) sum[j] *= a[j];
    return sum;
}

std::vector<cplx> mu_tilde(const std::vector<cplx>& a, const std::vector<cplx>* prev, int M) {
    if (!prev) return nu_tilde(a, M);
    const auto& b = *prev;
    std::vector<cplx> qa(a.size()), qb(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        qa[j] = cplx(1) - a[j] * a[j];
        qb[j] = cplx(1) - b[j] * b[j];
    }
    // sum_{k<M} qb^{M-1-k} qa^k evaluated with two running powers.
    std::vector<cplx> out(a.size(), cplx(0));
    std::vector<cplx> pa(a.size(), cplx(1));
    for (int k = 0; k < M; ++k) {
        std::vector<cplx> pb(a.size(), cplx(1));
        for (int j = 0; j < M - 1 - k; ++j)
            for (std::size_t t = 0; t < a.size(); ++t) pb[t] *= qb[t];
        for (std::size_t t = 0; t < a.size(); ++t) out[t] += pb[t] * pa[t];
        for (std::size_t t = 0; t < a.size(); ++t) pa[t] *= qa[t];
    }
    for (std::size_t t = 0; t < a.size(); ++t) out[t] *= a[t] + b[t];
    return out;
}

}  // namespace rychkov

DilationAlgebra::DilationAlgebra(std::vector<std::vector<cplx>> nu, int M)
    : nu_(std::move(nu)), M_(M) {
    if (nu_.empty()) throw std::invalid_argument("dilation algebra: no scales");
}

FamilyRealization::FamilyRealization(const ScaleLattice& lat, GridGeometry grid, long long window,
                                     FamilyOptions opt)
    : S_(&lat.structure()), lat_(&lat), grid_(std::move(grid)), window_(window), opt_(opt) {
    if ((int)grid_.log2n.size() != S_->dims())
        throw std::invalid_argument("family: grid rank must match scalar dimension count");
    const long long cap = (Rational(window_) * S_->matrix().max_entry()).ceil() + 1;
    for (auto& sc : lat_->enumerate(cap)) {
        bool keep = true;
        for (int j : sc.D)
            if (sc.L[j] > window_) keep = false;
        if (keep) scales_.push_back(sc);
    }
    for (const auto& sc : scales_)
        for (long long v : sc.L) max_ell_ = std::max(max_ell_, v);
    if (opt_.kind == FamilyKind::Tensor)
        build_tensor();
    else
        build_convolution();
}

void FamilyRealization::build_tensor() {
    const int n = S_->n();
    factor_grids_.resize(n);
    factor_map_.resize(n);
    factor_alg_.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& coords = S_->exponents().blocks[i];
        GridGeometry fg;
        for (int h : coords) {
            fg.log2n.push_back(grid_.log2n[h]);
            fg.period_log2.push_back(grid_.period_log2[h]);
        }
        factor_grids_[i] = fg;
        factor_map_[i].assign(grid_.total(), 0);
        for_each_index(grid_, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            std::size_t sub = 0;
            for (std::size_t k = 0; k < coords.size(); ++k)
                sub = sub * fg.n((int)k) + idx[coords[k]];
            factor_map_[i][flat] = sub;
        });

        std::vector<std::vector<cplx>> nu(max_ell_ + 1);
        if (opt_.mode == ProfileMode::FrequencyLocalized) {
            FactorProfile prof = make_frequency_profile(opt_.freq_plateau, opt_.freq_support);
            for (long long ell = 0; ell <= max_ell_; ++ell) {
                nu[ell].resize(fg.total());
                for_each_index(fg, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                    double r = 0;
                    for (std::size_t k = 0; k < coords.size(); ++k) {
                        const double lam = S_->exponents().lambda[coords[k]].to_double();
                        const double xi =
                            fg.freq((int)k, idx[k]) * std::pow(2.0, -(double)ell * lam);
                        r += std::pow(std::abs(xi), 1.0 / lam);
                    }
                    nu[ell][flat] = cplx(prof.nu_radial(r));
                });
            }
        } else {
            FactorProfile prof = make_space_profile((int)coords.size(), opt_.space_halfwidth);
            for (long long ell = 0; ell <= max_ell_; ++ell) {
                std::vector<cplx> samples(fg.total());
                std::vector<double> x(coords.size());
                for_each_index(fg, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                    for (std::size_t k = 0; k < coords.size(); ++k) {
                        const double lam = S_->exponents().lambda[coords[k]].to_double();
                        x[k] = fg.coord((int)k, idx[k]) * std::pow(2.0, (double)ell * lam);
                    }
                    samples[flat] = cplx(prof.phi_space(x));
                });
                fft_nd(samples, fg.dims(), false);
                // Unit discrete mass: zeroth moments of difference members
                // then vanish exactly.
                const cplx mass = samples[0];
                if (std::abs(mass) == 0.0)
                    throw std::logic_error("family: degenerate sampled profile");
                for (auto& v : samples) v /= mass;
                nu[ell] = std::move(samples);
            }
        }
        factor_alg_[i] = std::make_unique<DilationAlgebra>(std::move(nu), opt_.cancellation + 1);
    }
}

void FamilyRealization::build_convolution() {
    if (opt_.mode != ProfileMode::FrequencyLocalized)
        throw std::invalid_argument("convolution families are realized frequency-side only");
    const int n = S_->n();
    nhat_.resize(n);
    std::vector<double> xi(grid_.rank());
    for (int i = 0; i < n; ++i) {
        nhat_[i].resize(grid_.total());
        for_each_index(grid_, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            for (int h = 0; h < grid_.rank(); ++h) xi[h] = grid_.freq(h, idx[h]);
            nhat_[i][flat] = S_->norm_Nhat(i, xi);
        });
    }
}

std::vector<cplx> FamilyRealization::conv_nu(int i, long long ell) const {
    // The base profile is radial in Nhat_i, so the rescaled transform is the
    // transition applied to 2^-l Nhat_i (homogeneity of the dual norm).
    const double lo = std::pow(2.0, -0.75), hi = std::pow(2.0, 0.75);
    const double scale = std::pow(2.0, -(double)ell);
    std::vector<cplx> out(grid_.total());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = cplx(smooth_transition(scale * nhat_[i][k], lo, hi));
    return out;
}

std::vector<cplx> FamilyRealization::assemble(const Lattice& L, const std::vector<int>& D,
                                              bool tilded) const {
    const std::size_t total = grid_.total();
    const int M = opt_.cancellation + 1;
    std::vector<cplx> out(total, cplx(1));
    for (int i = 0; i < S_->n(); ++i) {
        const bool dotted = std::find(D.begin(), D.end(), i) != D.end();
        std::vector<cplx> part;
        if (opt_.kind == FamilyKind::Tensor) {
            const auto& alg = *factor_alg_[i];
            part = dotted ? (tilded ? alg.mu_tilde(L[i]) : alg.mu(L[i]))
                          : (tilded ? alg.nu_tilde(L[i]) : alg.nu(L[i]));
            const auto& map = factor_map_[i];
            for (std::size_t k = 0; k < total; ++k) out[k] *= part[map[k]];
        } else {
            auto cur = conv_nu(i, L[i]);
            if (dotted) {
                auto prev = conv_nu(i, L[i] - 1);
                part = tilded ? rychkov::mu_tilde(cur, &prev, M) : rychkov::mu(cur, &prev);
            } else {
                part = tilded ? rychkov::nu_tilde(cur, M) : cur;
            }
            for (std::size_t k = 0; k < total; ++k) out[k] *= part[k];
        }
    }
    return out;
}

std::vector<cplx> FamilyRealization::psi_hat(std::size_t s) const {
    return assemble(scales_[s].L, scales_[s].D, false);
}

std::vector<cplx> FamilyRealization::psi_tilde_hat(std::size_t s) const {
    return assemble(scales_[s].L, scales_[s].D, true);
}

std::vector<cplx> FamilyRealization::phi_hat(const Lattice& L) const {
    return assemble(L, {}, false);
}

std::vector<cplx> FamilyRealization::phi_tilde_hat(const Lattice& L) const {
    return assemble(L, {}, true);
}

std::vector<cplx> FamilyRealization::ungrouped_term_hat(const Lattice& M) const {
    if (opt_.kind != FamilyKind::Convolution)
        throw std::logic_error("ungrouped terms exist for the convolution kind only");
    std::vector<int> allD;
    for (int i = 0; i < S_->n(); ++i)
        if (M[i] > 0) allD.push_back(i);
    // mu factors in every coordinate with positive scale, nu at zero.
    std::vector<cplx> out(grid_.total(), cplx(1));
    for (int i = 0; i < S_->n(); ++i) {
        auto cur = conv_nu(i, M[i]);
        std::vector<cplx> part;
        if (M[i] > 0) {
            auto prev = conv_nu(i, M[i] - 1);
            part = rychkov::mu(cur, &prev);
        } else {
            part = cur;
        }
        for (std::size_t k = 0; k < out.size(); ++k) out[k] *= part[k];
    }
    return out;
}

SampledFunction FamilyRealization::member(std::size_t scale_index, bool tilded) const {
    return SampledFunction::from_spectrum(
        grid_, tilded ? psi_tilde_hat(scale_index) : psi_hat(scale_index));
}

SampledFunction FamilyRealization::convolve_member(const SampledFunction& f,
                                                   std::size_t scale_index, bool tilded) const {
    auto memspec = tilded ? psi_tilde_hat(scale_index) : psi_hat(scale_index);
    auto spec = f.samples();
    fft_nd(spec, grid_.dims(), false);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= memspec[k];
    fft_nd(spec, grid_.dims(), true);
    return SampledFunction(grid_, std::move(spec));
}

ReproducingReport verify_reproducing(const FamilyRealization& fam) {
    const auto& g = fam.grid();
    const double band = std::pow(2.0, (double)fam.window() - 2.0);
    std::vector<cplx> sum(g.total(), cplx(0)), sum_lp(g.total(), cplx(0));
    for (std::size_t s = 0; s < fam.scales().size(); ++s) {
        const auto p = fam.psi_hat(s);
        const auto pt = fam.psi_tilde_hat(s);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += p[k] * pt[k];
            sum_lp[k] += p[k];
        }
    }
    ReproducingReport rep;
    const Structure& s = fam.structure();
    std::vector<double> xi(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) xi[h] = g.freq(h, idx[h]);
        // Mid-band in every factor's block norm: only terms inside the window
        // can touch these frequencies.
        for (int i = 0; i < s.n(); ++i)
            if (s.block_norm(xi, i) > band) return;
        rep.probes++;
        rep.max_residual = std::max(rep.max_residual, std::abs(sum[flat] - cplx(1)));
        rep.max_residual_lp = std::max(rep.max_residual_lp, std::abs(sum_lp[flat] - cplx(1)));
    });
    return rep;
}

double telescoping_residual(const DilationAlgebra& alg, long long up_to) {
    double worst = 0;
    const std::size_t size = alg.nu(0).size();
    std::vector<cplx> acc(size, cplx(0));
    for (long long ell = 0; ell <= up_to; ++ell) {
        auto m = alg.mu(ell);
        auto mt = alg.mu_tilde(ell);
        for (std::size_t k = 0; k < size; ++k) acc[k] += m[k] * mt[k];
        const auto& n = alg.nu(ell);
        auto nt = alg.nu_tilde(ell);
        for (std::size_t k = 0; k < size; ++k)
            worst = std::max(worst, std::abs(acc[k] - n[k] * nt[k]));
    }
    return worst;
}

Lattice nearest_scale(const ScaleLattice& lat, const RationalVec& t) {
    const int n = (int)t.size();
    for (long long radius = 1;; ++radius) {
        Lattice lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::max(0LL, t[i].floor() - radius);
            hi[i] = t[i].ceil() + radius;
        }
        std::optional<Rational> best;
        Lattice arg;
        Lattice L = lo;
        while (true) {
            if (lat.admit(L)) {
                RationalVec lr(n);
                for (int i = 0; i < n; ++i) lr[i] = Rational(L[i]);
                Rational d = sup_distance(lr, t);
                if (!best || d < *best || (d == *best && L < arg)) {
                    best = d;
                    arg = L;
                }
            }
            int i = n - 1;
            while (i >= 0 && L[i] == hi[i]) { L[i] = lo[i]; --i; }
            if (i < 0) break;
            ++L[i];
        }
        if (best && *best <= Rational(radius)) return arg;
        if (radius > 64) throw std::logic_error("nearest_scale: search diverged");
    }
}

std::string family_cache_key(const Structure& s, const FamilyOptions& opt, long long window) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix64 = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (int j = 0; j < s.n(); ++j)
        for (int k = 0; k < s.n(); ++k) {
            mix64((std::uint64_t)s.e(j, k).num());
            mix64((std::uint64_t)s.e(j, k).den());
        }
    for (const auto& l : s.exponents().lambda) {
        mix64((std::uint64_t)l.num());
        mix64((std::uint64_t)l.den());
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s-%016llx-w%lld-m%d",
                  opt.kind == FamilyKind::Tensor ? "tensor" : "conv",
                  (unsigned long long)h, window, opt.cancellation);
    return buf;
}

namespace {

double grid_seminorm(const SampledFunction& f) {
    // max over samples of (1 + |x|_inf)^2 |f(x)|: a coarse Schwartz-type
    // seminorm adequate for ratio certification.
    const auto& g = f.geometry();
    double worst = 0;
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        double xmax = 0;
        for (int h = 0; h < g.rank(); ++h) xmax = std::max(xmax, std::abs(g.coord(h, idx[h])));
        worst = std::max(worst, std::pow(1 + xmax, 2.0) * std::abs(f.samples()[flat]));
    });
    return worst;
}

}  // namespace

CollapseResult convolution_collapse(const ScaleLattice& lat, const GridGeometry& grid,
                                    const std::vector<Symbol>& factor_hats,
                                    const Lattice& hat_scales) {
    const Structure& s = lat.structure();
    const int n = s.n();
    if ((int)factor_hats.size() != n) throw std::invalid_argument("collapse: arity mismatch");
    CollapseResult res;
    res.t_tilde.resize(n);
    for (int j = 0; j < n; ++j) {
        Rational best = s.e(j, 0) * Rational(hat_scales[0]);
        for (int i = 1; i < n; ++i) best = Rational::min(best, s.e(j, i) * Rational(hat_scales[i]));
        res.t_tilde[j] = best;
    }
    if (lat.admit(hat_scales))
        res.L = hat_scales;
    else
        res.L = nearest_scale(lat, res.t_tilde);

    const Lattice L = res.L;
    std::vector<double> lam(s.dims());
    for (int h = 0; h < s.dims(); ++h) lam[h] = s.exponents().lambda[h].to_double();
    std::vector<int> fo(s.dims());
    for (int h = 0; h < s.dims(); ++h) fo[h] = s.factor_of(h);
    const Lattice scales = hat_scales;
    const Structure* sp = &s;
    res.k_hat = [factor_hats, L, lam, fo, scales, sp, n](const std::vector<double>& xi) {
        std::vector<double> base(xi.size());
        for (std::size_t h = 0; h < xi.size(); ++h)
            base[h] = xi[h] * std::pow(2.0, (double)L[fo[h]] * lam[h]);
        cplx prod(1);
        for (int i = 0; i < n; ++i) {
            std::vector<double> y(xi.size());
            for (std::size_t h = 0; h < xi.size(); ++h)
                y[h] = base[h] *
                       std::pow(2.0, -(double)scales[i] * sp->coord_exponent(i, (int)h, true));
            prod *= factor_hats[i](y);
        }
        return prod;
    };

    SampledFunction k = SampledFunction::from_symbol(grid, res.k_hat);
    double denom = 1.0;
    for (int i = 0; i < n; ++i)
        denom *= grid_seminorm(SampledFunction::from_symbol(grid, factor_hats[i]));
    res.seminorm_ratio = denom > 0 ? grid_seminorm(k) / denom : 0.0;
    return res;
}

}  // namespace multinorm
