#include "multinorm/squarefn.hpp"

#include <algorithm>

#include "multinorm/parallel.hpp"
#include <cmath>
#include <stdexcept>

namespace multinorm {

namespace {

// Deterministic pairwise reduction with binary-counter carries: terms are
// pushed one at a time and merged like binary addition, so memory stays
// logarithmic in the term count and the association order is fixed.
class PairwiseAccumulator {
public:
    void push(std::vector<double> term) {
        for (std::size_t level = 0;; ++level) {
            if (level == slots_.size()) {
                slots_.push_back(std::move(term));
                return;
            }
            if (slots_[level].empty()) {
                slots_[level] = std::move(term);
                return;
            }
            for (std::size_t k = 0; k < term.size(); ++k) term[k] += slots_[level][k];
            slots_[level].clear();
        }
    }
    std::vector<double> finish(std::size_t size) {
        std::vector<double> out(size, 0.0);
        for (auto& s : slots_)
            if (!s.empty())
                for (std::size_t k = 0; k < size; ++k) out[k] += s[k];
        return out;
    }

private:
    std::vector<std::vector<double>> slots_;
};

std::vector<double> abs_squared(const SampledFunction& f) {
    std::vector<double> v(f.samples().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::norm(f.samples()[k]);
    return v;
}

SampledFunction sqrt_field(const GridGeometry& g, std::vector<double> sq) {
    std::vector<cplx> out(sq.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cplx(std::sqrt(sq[k]));
    return SampledFunction(g, std::move(out));
}

}  // namespace

SampledFunction s_tensor(const SampledFunction& f, const FamilyRealization& fam) {
    if (fam.options().kind != FamilyKind::Tensor)
        throw std::invalid_argument("s_tensor: family must be of tensor kind");
    std::vector<std::vector<double>> slots(fam.scales().size());
    parallel_for(fam.scales().size(),
                 [&](std::size_t s) { slots[s] = abs_squared(fam.convolve_member(f, s, false)); });
    PairwiseAccumulator acc;
    for (auto& s : slots) acc.push(std::move(s));
    return sqrt_field(f.geometry(), acc.finish(f.geometry().total()));
}

SampledFunction s_conv(const SampledFunction& f, const FamilyRealization& fam) {
    if (fam.options().kind != FamilyKind::Convolution)
        throw std::invalid_argument("s_conv: family must be of convolution kind");
    std::vector<std::vector<double>> slots(fam.scales().size());
    parallel_for(fam.scales().size(),
                 [&](std::size_t s) { slots[s] = abs_squared(fam.convolve_member(f, s, false)); });
    PairwiseAccumulator acc;
    for (auto& s : slots) acc.push(std::move(s));
    return sqrt_field(f.geometry(), acc.finish(f.geometry().total()));
}

SampledFunction s_grid(const SampledFunction& f, const FamilyRealization& fam) {
    if (fam.options().kind != FamilyKind::Convolution)
        throw std::invalid_argument("s_grid: family must be of convolution kind");
    const int n = fam.structure().n();
    const long long W = fam.window();
    std::vector<Lattice> points;
    {
        Lattice M(n, 0);
        while (true) {
            points.push_back(M);
            int i = n - 1;
            while (i >= 0 && M[i] == W) M[i--] = 0;
            if (i < 0) break;
            ++M[i];
        }
    }
    auto spec0 = f.samples();
    fft_nd(spec0, f.geometry().dims(), false);
    std::vector<std::vector<double>> slots(points.size());
    parallel_for(points.size(), [&](std::size_t p) {
        auto term = fam.ungrouped_term_hat(points[p]);
        for (std::size_t k = 0; k < term.size(); ++k) term[k] *= spec0[k];
        fft_nd(term, f.geometry().dims(), true);
        std::vector<double> v(term.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::norm(term[k]);
        slots[p] = std::move(v);
    });
    PairwiseAccumulator acc;
    for (auto& s : slots) acc.push(std::move(s));
    return sqrt_field(f.geometry(), acc.finish(f.geometry().total()));
}

SampledFunction rectangle_sup(const SampledFunction& g, const DyadicSystem& dy, const Lattice& L) {
    const auto& geom = g.geometry();
    const Structure& s = dy.structure();
    // Samples per rectangle side along axis h: side length 2^-mu(l,h) over
    // spacing 2^{P-log2n}; clamp at one sample when the grid cannot resolve.
    // Because block | N, grouping consecutive storage indices idx/block is
    // exactly the geometric tiling (it never straddles the wrap point).
    std::vector<std::size_t> block(geom.rank());
    std::vector<std::size_t> groups_per_axis(geom.rank());
    for (int h = 0; h < geom.rank(); ++h) {
        const int j = s.factor_of(h);
        const long long mu = dy.sequence().mu(L[j], h);
        const long long log2block = (long long)geom.log2n[h] - (geom.period_log2[h] + mu);
        block[h] = log2block <= 0 ? 1 : (std::size_t)1 << log2block;
        groups_per_axis[h] = geom.n(h) / block[h];
    }
    std::size_t total_groups = 1;
    for (int h = 0; h < geom.rank(); ++h) total_groups *= groups_per_axis[h];
    std::vector<double> groupmax(total_groups, 0.0);
    auto key_of = [&](const std::vector<std::size_t>& ix) {
        std::size_t key = 0;
        for (int h = 0; h < geom.rank(); ++h) key = key * groups_per_axis[h] + ix[h] / block[h];
        return key;
    };
    for_each_index(geom, [&](std::size_t flat, const std::vector<std::size_t>& ix) {
        groupmax[key_of(ix)] = std::max(groupmax[key_of(ix)], std::abs(g.samples()[flat]));
    });
    std::vector<cplx> out(geom.total());
    for_each_index(geom, [&](std::size_t flat, const std::vector<std::size_t>& ix) {
        out[flat] = cplx(groupmax[key_of(ix)]);
    });
    return SampledFunction(geom, std::move(out));
}

SampledFunction s_pp(const SampledFunction& f, const FamilyRealization& fam,
                     const DyadicSystem& dy) {
    if (fam.options().kind != FamilyKind::Tensor)
        throw std::invalid_argument("s_pp: family must be of tensor kind");
    std::vector<std::vector<double>> slots(fam.scales().size());
    parallel_for(fam.scales().size(), [&](std::size_t s) {
        auto conv = fam.convolve_member(f, s, false);
        auto sup = rectangle_sup(conv, dy, fam.scales()[s].L);
        slots[s] = abs_squared(sup);
    });
    PairwiseAccumulator acc;
    for (auto& s : slots) acc.push(std::move(s));
    return sqrt_field(f.geometry(), acc.finish(f.geometry().total()));
}

namespace {

// Box half-width in samples for factor radius 2^-j along coordinate h.
long long half_width_samples(const Structure& s, const GridGeometry& g, int h, long long j) {
    const double lam = s.exponents().lambda[h].to_double();
    const double r = std::pow(2.0, -(double)j * lam);  // r^lambda_h
    return (long long)std::floor(r / g.spacing(h) + 1e-12);
}

}  // namespace

SampledFunction strong_maximal(const Structure& s, const SampledFunction& f,
                               const StrongMaximalOptions& opt) {
    const auto& g = f.geometry();
    const int n = s.n();
    const int rank = g.rank();
    std::vector<double> absf(g.total());
    for (std::size_t k = 0; k < absf.size(); ++k) absf[k] = std::abs(f.samples()[k]);

    // Prefix sums along each axis give O(1) wrapped box sums per radius.
    // For nonnegative dyadic data the subtraction is exact.
    std::vector<std::size_t> dims = g.dims();
    std::vector<double> best(g.total(), 0.0);
    std::vector<long long> radii(n, 0);
    while (true) {
        // Box half-widths per axis and the normalization prod r_i^{-q_i}.
        std::vector<long long> hw(rank);
        bool valid = true;
        for (int h = 0; h < rank; ++h) {
            hw[h] = half_width_samples(s, g, h, radii[s.factor_of(h)]);
            if (2 * hw[h] + 1 > (long long)g.n(h)) hw[h] = (long long)g.n(h) / 2 - 1;
            if (hw[h] < 0) valid = false;
        }
        double norm = 1.0;
        for (int i = 0; i < n; ++i)
            norm *= std::pow(2.0, (double)radii[i] * s.q(i).to_double());
        if (valid) {
            // Separable sliding sums: repeatedly average along each axis.
            std::vector<double> acc = absf;
            for (int h = 0; h < rank; ++h) {
                std::vector<double> next(acc.size(), 0.0);
                const std::size_t nh = g.n(h);
                std::size_t stride = 1;
                for (int d = h + 1; d < rank; ++d) stride *= g.n(d);
                std::size_t before = 1;
                for (int d = 0; d < h; ++d) before *= g.n(d);
                for (std::size_t b = 0; b < before; ++b)
                    for (std::size_t a = 0; a < stride; ++a) {
                        double* nl = next.data();
                        const double* al = acc.data();
                        const std::size_t base = b * nh * stride + a;
                        for (std::size_t k = 0; k < nh; ++k) {
                            double sum = 0;
                            for (long long off = -hw[h]; off <= hw[h]; ++off) {
                                const std::size_t kk = (std::size_t)(((long long)k + off +
                                                                      2 * (long long)nh) %
                                                                     (long long)nh);
                                sum += al[base + kk * stride];
                            }
                            nl[base + k * stride] = sum;
                        }
                    }
                acc = std::move(next);
            }
            const double cell = g.cell_volume();
            for (std::size_t k = 0; k < best.size(); ++k)
                best[k] = std::max(best[k], norm * cell * acc[k]);
        }
        int i = n - 1;
        while (i >= 0 && radii[i] == opt.max_depth) radii[i--] = 0;
        if (i < 0) break;
        ++radii[i];
    }
    std::vector<cplx> out(best.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cplx(best[k]);
    return SampledFunction(g, std::move(out));
}

SampledFunction strong_maximal_reference(const Structure& s, const SampledFunction& f,
                                         const StrongMaximalOptions& opt) {
    const auto& g = f.geometry();
    const int n = s.n();
    const int rank = g.rank();
    std::vector<double> absf(g.total());
    for (std::size_t k = 0; k < absf.size(); ++k) absf[k] = std::abs(f.samples()[k]);
    std::vector<double> best(g.total(), 0.0);
    std::vector<long long> radii(n, 0);
    std::vector<std::size_t> strides(rank, 1);
    for (int h = rank - 2; h >= 0; --h) strides[h] = strides[h + 1] * g.n(h + 1);
    while (true) {
        std::vector<long long> hw(rank);
        for (int h = 0; h < rank; ++h) {
            hw[h] = half_width_samples(s, g, h, radii[s.factor_of(h)]);
            if (2 * hw[h] + 1 > (long long)g.n(h)) hw[h] = (long long)g.n(h) / 2 - 1;
        }
        double norm = 1.0;
        for (int i = 0; i < n; ++i)
            norm *= std::pow(2.0, (double)radii[i] * s.q(i).to_double());
        const double cell = g.cell_volume();
        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& centre) {
            double sum = 0;
            std::vector<long long> off(rank, 0);
            for (int h = 0; h < rank; ++h) off[h] = -hw[h];
            while (true) {
                std::size_t idx = 0;
                for (int h = 0; h < rank; ++h) {
                    const long long nh = (long long)g.n(h);
                    idx += strides[h] *
                           (std::size_t)((((long long)centre[h] + off[h]) % nh + nh) % nh);
                }
                sum += absf[idx];
                int h = rank - 1;
                while (h >= 0 && off[h] == hw[h]) {
                    off[h] = -hw[h];
                    --h;
                }
                if (h < 0) break;
                ++off[h];
            }
            best[flat] = std::max(best[flat], norm * cell * sum);
        });
        int i = n - 1;
        while (i >= 0 && radii[i] == opt.max_depth) radii[i--] = 0;
        if (i < 0) break;
        ++radii[i];
    }
    std::vector<cplx> out(best.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cplx(best[k]);
    return SampledFunction(g, std::move(out));
}

namespace {

void spread(double ratio, double& spread) { spread = std::max(spread, ratio); }

}  // namespace

SquareFunctionReport equivalence_report(const std::vector<SampledFunction>& corpus,
                                        const std::vector<std::string>& names,
                                        const FamilyRealization& tensor_a,
                                        const FamilyRealization& tensor_b,
                                        const FamilyRealization& conv, const DyadicSystem& dy,
                                        std::uint64_t seed) {
    SquareFunctionReport rep;
    rep.seed = seed;
    rep.window = tensor_a.window();
    for (std::size_t c = 0; c < corpus.size(); ++c) {
        EquivalenceRow row;
        row.function_name = c < names.size() ? names[c] : "f" + std::to_string(c);
        row.tensor_a = s_tensor(corpus[c], tensor_a).norm_l1();
        row.tensor_b = s_tensor(corpus[c], tensor_b).norm_l1();
        row.conv = s_conv(corpus[c], conv).norm_l1();
        row.grid = s_grid(corpus[c], conv).norm_l1();
        row.pp = s_pp(corpus[c], tensor_a, dy).norm_l1();
        rep.rows.push_back(row);
        if (row.tensor_a <= 0 || row.tensor_b <= 0 || row.conv <= 0 || row.grid <= 0) {
            rep.degenerate++;
            continue;
        }
        auto ratio = [](double a, double b) { return std::max(a / b, b / a); };
        spread(ratio(row.tensor_a, row.tensor_b), rep.tensor_ratio_spread);
        spread(ratio(row.conv, row.tensor_a), rep.conv_tensor_spread);
        spread(ratio(row.grid, row.conv), rep.grid_conv_spread);
        spread(row.pp / row.tensor_a, rep.pp_tensor_spread);
    }
    return rep;
}

}  // namespace multinorm
