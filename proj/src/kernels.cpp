#include "multinorm/kernels.hpp"

#include <cmath>
#include <functional>
#include <cctype>
#include <cstring>
#include <random>
#include <stdexcept>

namespace multinorm {

namespace {

// Central finite difference of order alpha (componentwise nesting).
cplx finite_difference(const Symbol& m, std::vector<double> xi, const std::vector<int>& alpha,
                       const std::vector<double>& steps, int axis = 0) {
    if (axis == (int)alpha.size()) return m(xi);
    if (alpha[axis] == 0) return finite_difference(m, xi, alpha, steps, axis + 1);
    std::vector<int> lower = alpha;
    --lower[axis];
    const double h = steps[axis];
    std::vector<double> plus = xi, minus = xi;
    plus[axis] += h / 2;
    minus[axis] -= h / 2;
    return (finite_difference(m, plus, lower, steps, axis) -
            finite_difference(m, minus, lower, steps, axis)) /
           h;
}

std::vector<std::vector<int>> multi_indices(int dims, int max_order) {
    std::vector<std::vector<int>> out;
    std::vector<int> alpha(dims, 0);
    // Enumerate all alpha with |alpha| <= max_order.
    std::function<void(int, int)> rec = [&](int h, int left) {
        if (h == dims) {
            out.push_back(alpha);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            alpha[h] = a;
            rec(h + 1, left - a);
        }
        alpha[h] = 0;
    };
    rec(0, max_order);
    return out;
}

double normalized_constant(const Structure& s, const Symbol& m, const std::vector<double>& xi,
                           const std::vector<int>& alpha) {
    std::vector<double> steps(xi.size());
    for (std::size_t h = 0; h < xi.size(); ++h) steps[h] = 1e-3 * (1.0 + std::abs(xi[h]) * 1e-2);
    const double d = std::abs(finite_difference(m, xi, alpha, steps));
    double weight = 1.0;
    for (int i = 0; i < s.n(); ++i) {
        std::vector<int> ai(alpha.size(), 0);
        for (int h : s.exponents().blocks[i]) ai[h] = alpha[h];
        const double len = s.block_length(alpha, i).to_double();
        weight *= std::pow(1.0 + s.norm_Nhat(i, xi), len);
    }
    return d * weight;
}

std::vector<std::vector<double>> sample_points(const Structure& s, std::size_t count, double radius,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(-2.0, std::log2(radius));
    std::vector<std::vector<double>> pts;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> xi(s.dims());
        for (int h = 0; h < s.dims(); ++h) xi[h] = unif(rng) * std::pow(2.0, mag(rng));
        pts.push_back(std::move(xi));
    }
    return pts;
}

}  // namespace

MultiplierReport validate_multiplier(const Structure& s, const Multiplier& mult, int max_order,
                                     const MultiplierSampleSet& samples) {
    MultiplierReport rep;
    auto sparse = sample_points(s, samples.count, samples.radius, samples.seed);
    auto dense = sample_points(s, samples.count * 2, samples.radius * 2, samples.seed + 1);
    bool pass = true;
    for (const auto& alpha : multi_indices(s.dims(), max_order)) {
        MultiplierOrderReport o;
        o.alpha = alpha;
        for (const auto& xi : sparse)
            o.constant = std::max(o.constant, normalized_constant(s, mult.m, xi, alpha));
        for (const auto& xi : dense)
            o.constant_dense = std::max(o.constant_dense, normalized_constant(s, mult.m, xi, alpha));
        o.finite = std::isfinite(o.constant) && std::isfinite(o.constant_dense);
        if (!o.finite || o.constant_dense > rep.growth_cap * o.constant + 1e-6) pass = false;
        rep.orders.push_back(std::move(o));
    }
    rep.passed = pass;
    return rep;
}

DyadicKernel::DyadicKernel(const FamilyRealization& fam, const Multiplier& m)
    : fam_(&fam), m_(m) {
    const auto& g = fam.grid();
    total_.assign(g.total(), cplx(0));
    std::vector<double> xi(g.rank());
    mvals_.assign(g.total(), cplx(0));
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) xi[h] = g.freq(h, idx[h]);
        mvals_[flat] = m_.m(xi);
    });
    for (std::size_t sidx = 0; sidx < fam.scales().size(); ++sidx) {
        auto p = piece(sidx);
        for (std::size_t k = 0; k < p.size(); ++k) total_[k] += p[k];
    }
}

std::vector<cplx> DyadicKernel::piece(std::size_t scale_index) const {
    std::vector<cplx> p = fam_->psi_hat(scale_index);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] *= mvals_[k];
    return p;
}

SampledFunction DyadicKernel::apply(const SampledFunction& f) const {
    auto spec = f.samples();
    fft_nd(spec, fam_->grid().dims(), false);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= total_[k];
    fft_nd(spec, fam_->grid().dims(), true);
    return SampledFunction(fam_->grid(), std::move(spec));
}

SampledFunction DyadicKernel::apply_direct(const SampledFunction& f) const {
    const auto& g = fam_->grid();
    std::vector<cplx> band(g.total(), cplx(0));
    for (std::size_t sidx = 0; sidx < fam_->scales().size(); ++sidx) {
        const auto& p = fam_->psi_hat(sidx);
        for (std::size_t k = 0; k < band.size(); ++k) band[k] += p[k];
    }
    auto spec = f.samples();
    fft_nd(spec, g.dims(), false);
    std::vector<double> xi(g.rank());
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        for (int h = 0; h < g.rank(); ++h) xi[h] = g.freq(h, idx[h]);
        spec[flat] *= m_.m(xi) * band[flat];
    });
    fft_nd(spec, g.dims(), true);
    return SampledFunction(g, std::move(spec));
}

double DyadicKernel::max_on_vanishing_subspaces() const {
    // m_L as a function of the rescaled variable: m_L(xi) = m(2^L xi)PsiHat_L(xi);
    // on our grids the tabulated piece is m(xi)PsiHat_L(2^-L xi), which must
    // vanish wherever xi_{k_r} = 0 for a dotted k_r.
    const auto& g = fam_->grid();
    double worst = 0;
    for (std::size_t sidx = 0; sidx < fam_->scales().size(); ++sidx) {
        const auto& sc = fam_->scales()[sidx];
        if (sc.D.empty()) continue;
        const auto piece = this->piece(sidx);
        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            for (int k : sc.D) {
                bool zero_block = true;
                for (int h : fam_->structure().exponents().blocks[k])
                    if (idx[h] != 0) zero_block = false;
                if (zero_block) worst = std::max(worst, std::abs(piece[flat]));
            }
        });
    }
    return worst;
}

double smooth_homogeneous_norm(const std::vector<double>& exponents,
                               const std::vector<double>& x) {
    double sup = 0;
    bool zero = true;
    for (std::size_t h = 0; h < x.size(); ++h) {
        if (x[h] != 0) zero = false;
        sup = std::max(sup, std::pow(std::abs(x[h]), 1.0 / exponents[h]));
    }
    if (zero) throw std::domain_error("smooth_homogeneous_norm: x = 0");
    auto g = [&](double r) {
        double s = 0;
        for (std::size_t h = 0; h < x.size(); ++h) {
            const double t = std::pow(r, -exponents[h]) * x[h];
            s += t * t;
        }
        return s - 1.0;
    };
    // g is strictly decreasing in r; bracket then bisect + Newton-like refine.
    double lo = sup / std::sqrt((double)x.size() + 1.0), hi = sup * 2.0 + 1e-300;
    while (g(lo) < 0) lo *= 0.5;
    while (g(hi) > 0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

Multiplier riesz_local(const Structure& s, int i, int j) {
    std::vector<double> exps(s.dims());
    for (int h = 0; h < s.dims(); ++h) exps[h] = s.coord_exponent(i, h, /*dual=*/true);
    Multiplier out;
    out.name = "riesz(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    out.m = [exps, j](const std::vector<double>& xi) {
        bool zero = true;
        for (double v : xi)
            if (v != 0) zero = false;
        if (zero) return cplx(0);
        const double r = smooth_homogeneous_norm(exps, xi);
        const double cut = 1.0 - smooth_transition(r, 1.0, 2.0);
        if (cut == 0.0) return cplx(0);
        return cplx(cut * xi[j] / std::pow(r, exps[j]));
    };
    return out;
}

Multiplier riesz_product(const Structure& s, const std::vector<int>& coords) {
    std::vector<Multiplier> factors;
    std::string name = "riesz_product(";
    for (int i = 0; i < s.n(); ++i) {
        if (coords[i] < 0) continue;  // identity factor
        factors.push_back(riesz_local(s, i, coords[i]));
        name += std::to_string(i + 1) + ":" + std::to_string(coords[i] + 1) + " ";
    }
    name += ")";
    Multiplier out;
    out.name = name;
    out.m = [factors](const std::vector<double>& xi) {
        cplx p(1);
        for (const auto& f : factors) p *= f.m(xi);
        return p;
    };
    return out;
}

Multiplier local_mihlin_symbol(const Structure& s, int i) {
    std::vector<double> exps(s.dims());
    for (int h = 0; h < s.dims(); ++h) exps[h] = s.coord_exponent(i, h, /*dual=*/true);
    Multiplier out;
    out.name = "mihlin(" + std::to_string(i + 1) + ")";
    out.m = [exps](const std::vector<double>& xi) {
        bool zero = true;
        for (double v : xi)
            if (v != 0) zero = false;
        if (zero) return cplx(0);
        const double r = smooth_homogeneous_norm(exps, xi);
        const double cut = 1.0 - smooth_transition(r, 1.0, 2.0);
        if (cut == 0.0) return cplx(0);
        // Zero-homogeneous oscillation: the classic log-oscillating symbol.
        return cplx(cut) * std::exp(cplx(0, std::log(r)));
    };
    return out;
}


namespace {

// Recursive-descent parser for the expression mini-format (grammar v1).
struct ExprParser {
    const Structure* s;
    std::string src;
    std::size_t pos = 0;

    using Node = std::function<double(const std::vector<double>& xi)>;

    void skip() {
        while (pos < src.size() && std::isspace((unsigned char)src[pos])) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            throw std::invalid_argument(std::string("multiplier: expected '") + c +
                                        "' at offset " + std::to_string(pos));
    }
    bool keyword(const char* kw) {
        skip();
        const std::size_t len = std::strlen(kw);
        if (src.compare(pos, len, kw) == 0) {
            pos += len;
            return true;
        }
        return false;
    }
    double number() {
        skip();
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(src.substr(pos), &used);
        } catch (...) {
            throw std::invalid_argument("multiplier: expected a number at offset " +
                                        std::to_string(pos));
        }
        pos += used;
        return v;
    }
    int factor_index() {
        skip();
        if (pos >= src.size() || !std::isdigit((unsigned char)src[pos]))
            throw std::invalid_argument("multiplier: expected a factor index at offset " +
                                        std::to_string(pos));
        int idx = 0;
        while (pos < src.size() && std::isdigit((unsigned char)src[pos]))
            idx = idx * 10 + (src[pos++] - '0');
        if (idx < 1 || idx > s->n())
            throw std::invalid_argument("multiplier: factor index out of range");
        return idx - 1;
    }

    Node expression() {
        Node lhs = product();
        while (true) {
            skip();
            if (eat('+')) {
                Node rhs = product();
                lhs = [lhs, rhs](const std::vector<double>& xi) { return lhs(xi) + rhs(xi); };
            } else if (pos < src.size() && src[pos] == '-' ) {
                ++pos;
                Node rhs = product();
                lhs = [lhs, rhs](const std::vector<double>& xi) { return lhs(xi) - rhs(xi); };
            } else {
                return lhs;
            }
        }
    }
    Node product() {
        Node lhs = unary();
        while (true) {
            skip();
            if (eat('*')) {
                Node rhs = unary();
                lhs = [lhs, rhs](const std::vector<double>& xi) { return lhs(xi) * rhs(xi); };
            } else if (eat('/')) {
                Node rhs = unary();
                lhs = [lhs, rhs](const std::vector<double>& xi) {
                    const double d = rhs(xi);
                    return d == 0 ? 0.0 : lhs(xi) / d;
                };
            } else {
                return lhs;
            }
        }
    }
    Node unary() {
        skip();
        if (eat('-')) {
            Node inner = unary();
            return [inner](const std::vector<double>& xi) { return -inner(xi); };
        }
        return atom();
    }
    Node atom() {
        skip();
        if (keyword("cutoff")) {
            expect('(');
            Node e = expression();
            expect(',');
            const double a = number();
            expect(',');
            const double b = number();
            expect(')');
            if (!(a < b)) throw std::invalid_argument("multiplier: cutoff needs a < b");
            return [e, a, b](const std::vector<double>& xi) {
                return smooth_transition(e(xi), a, b);
            };
        }
        if (keyword("pow")) {
            expect('(');
            Node e = expression();
            expect(',');
            const double q = number();
            expect(')');
            return [e, q](const std::vector<double>& xi) {
                return std::pow(std::abs(e(xi)), q);
            };
        }
        if (keyword("abs")) {
            const int i = factor_index();
            const Structure* st = s;
            return [st, i](const std::vector<double>& xi) { return st->block_norm(xi, i); };
        }
        if (keyword("nhat")) {
            const int i = factor_index();
            const Structure* st = s;
            return [st, i](const std::vector<double>& xi) { return st->norm_Nhat(i, xi); };
        }
        if (keyword("norm")) {
            const int i = factor_index();
            std::vector<double> exps(s->dims());
            for (int h = 0; h < s->dims(); ++h) exps[h] = s->coord_exponent(i, h, true);
            return [exps](const std::vector<double>& xi) {
                for (double v : xi)
                    if (v != 0) return smooth_homogeneous_norm(exps, xi);
                return 0.0;
            };
        }
        if (eat('(')) {
            Node e = expression();
            expect(')');
            return e;
        }
        skip();
        if (pos < src.size() && (std::isdigit((unsigned char)src[pos]) || src[pos] == '.')) {
            const double v = number();
            return [v](const std::vector<double>&) { return v; };
        }
        throw std::invalid_argument("multiplier: unexpected token at offset " +
                                    std::to_string(pos));
    }
};

}  // namespace

Multiplier parse_multiplier(const Structure& s, const std::string& source) {
    ExprParser p{&s, source};
    auto node = p.expression();
    p.skip();
    if (p.pos != source.size())
        throw std::invalid_argument("multiplier: trailing input at offset " +
                                    std::to_string(p.pos));
    Multiplier out;
    out.name = source;
    out.m = [node](const std::vector<double>& xi) { return cplx(node(xi)); };
    return out;
}

}  // namespace multinorm
