#include "multinorm/corpus.hpp"

#include <cmath>
#include <random>

namespace multinorm {

Corpus make_corpus(const Structure& s, const ScaleLattice& lat, const DyadicSystem& dy,
                   const GridGeometry& g, long long window, std::uint64_t seed,
                   std::size_t per_kind) {
    (void)lat;
    Corpus corpus;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const int rank = g.rank();

    // (a) single-block bumps at a random scale and position.
    for (std::size_t k = 0; k < per_kind; ++k) {
        const long long ell = (long long)(rng() % (window + 1));
        std::vector<double> centre(rank);
        for (int h = 0; h < rank; ++h) centre[h] = unif(rng);
        const int block = (int)(rng() % s.n());
        auto f = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
            double v = 1.0;
            for (int h = 0; h < rank; ++h) {
                const double lam = s.exponents().lambda[h].to_double();
                const double width = s.factor_of(h) == block
                                         ? 0.4 * std::pow(2.0, -(double)ell * lam)
                                         : 0.4;
                v *= unit_bump((x[h] - centre[h]) / width);
            }
            return cplx(v);
        });
        corpus.functions.push_back(std::move(f));
        corpus.names.push_back("bump_b" + std::to_string(block) + "_l" + std::to_string(ell) +
                               "_" + std::to_string(k));
    }

    // (b) random band-limited trigonometric polynomials under an envelope.
    for (std::size_t k = 0; k < per_kind; ++k) {
        const int modes = 6;
        std::vector<std::vector<double>> freq(modes, std::vector<double>(rank));
        std::vector<double> amp(modes), phase(modes);
        const double fmax = std::pow(2.0, (double)window - 1.5);
        std::uniform_real_distribution<double> fd(-fmax, fmax), ph(0, 6.2831853);
        for (int m = 0; m < modes; ++m) {
            for (int h = 0; h < rank; ++h) freq[m][h] = fd(rng);
            amp[m] = 0.3 + (double)(rng() % 100) / 100.0;
            phase[m] = ph(rng);
        }
        auto f = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
            double envelope = 1.0;
            for (int h = 0; h < rank; ++h) envelope *= unit_bump(x[h] / 0.8);
            double v = 0.0;
            for (int m = 0; m < modes; ++m) {
                double arg = phase[m];
                for (int h = 0; h < rank; ++h) arg += 2 * 3.14159265358979 * freq[m][h] * x[h];
                v += amp[m] * std::cos(arg);
            }
            return cplx(envelope * v);
        });
        corpus.functions.push_back(std::move(f));
        corpus.names.push_back("trig_" + std::to_string(k));
    }

    // (c) near-atoms: cancellative bumps on dyadic rectangles.
    for (std::size_t k = 0; k < per_kind; ++k) {
        Lattice L(s.n());
        for (int i = 0; i < s.n(); ++i) L[i] = (long long)(rng() % (window + 1));
        std::vector<double> point(rank);
        for (int h = 0; h < rank; ++h) point[h] = unif(rng);
        auto rect = dy.rectangle_at(point, L);
        Box geo = dy.rectangle_box(rect);
        const int hflip = (int)(rng() % rank);
        auto f = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
            double v = 1.0;
            for (int h = 0; h < rank; ++h) {
                const double mid = 0.5 * (geo.lo[h] + geo.hi[h]);
                const double half = 0.5 * (geo.hi[h] - geo.lo[h]);
                const double t = (x[h] - mid) / half;
                v *= unit_bump(t);
                if (h == hflip) v *= t;  // odd factor: one-order cancellation
            }
            return cplx(v);
        });
        const double l2 = f.norm_l2();
        if (l2 > 0) f *= 1.0 / (l2 * std::sqrt(rect.measure()));
        corpus.functions.push_back(std::move(f));
        corpus.names.push_back("near_atom_" + std::to_string(k));
    }

    // (d) approximate point masses mollified at several scales.
    for (std::size_t k = 0; k < per_kind; ++k) {
        const long long ell = (long long)(rng() % (window + 1));
        std::vector<double> centre(rank);
        for (int h = 0; h < rank; ++h) centre[h] = unif(rng);
        const double width = 0.3 * std::pow(2.0, -(double)ell);
        auto f = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
            double v = 1.0;
            for (int h = 0; h < rank; ++h) v *= unit_bump((x[h] - centre[h]) / width);
            return cplx(v);
        });
        const double l1 = f.norm_l1();
        if (l1 > 0) f *= 1.0 / l1;  // unit mass
        corpus.functions.push_back(std::move(f));
        corpus.names.push_back("mollified_delta_l" + std::to_string(ell) + "_" +
                               std::to_string(k));
    }
    return corpus;
}

}  // namespace multinorm
