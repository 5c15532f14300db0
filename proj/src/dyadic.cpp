#include "multinorm/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace multinorm {

AdmissibleSequence::AdmissibleSequence(const Exponents& exps) : dims_(exps.dims()) {
    std::vector<Rational> lambda = exps.lambda;
    mu_ = [lambda](long long ell, int h) { return (lambda[h] * Rational(ell)).floor(); };
}

AdmissibleSequence::AdmissibleSequence(std::function<long long(long long, int)> mu, int dims)
    : mu_(std::move(mu)), dims_(dims) {}

double AdmissibleSequence::validate(const Exponents& exps, long long max_ell) const {
    double a = 0.0;
    for (int h = 0; h < dims_; ++h) {
        if (mu_(0, h) != 0) throw std::invalid_argument("admissible sequence: mu(0,h) != 0");
        long long prev = 0;
        for (long long ell = 0; ell <= max_ell; ++ell) {
            long long v = mu_(ell, h);
            if (v < prev) throw std::invalid_argument("admissible sequence: not non-decreasing");
            prev = v;
            a = std::max(a, std::abs((double)v - (double)ell * exps.lambda[h].to_double()));
        }
    }
    return a;
}

bool DyadicInterval::contains(const DyadicInterval& o) const {
    if (o.mu < mu) return false;  // candidate is coarser
    // [p 2^-mu, (p+1) 2^-mu) contains [q 2^-nu, (q+1)2^-nu) iff q >> (nu-mu) == p.
    const long long shift = o.mu - mu;
    if (shift >= 63) return false;
    long long q = o.p >> shift;  // arithmetic shift floors negatives
    return q == p;
}

bool DyadicCube::contains(const DyadicCube& o) const {
    if (factor != o.factor || sides.size() != o.sides.size()) return false;
    for (std::size_t k = 0; k < sides.size(); ++k)
        if (!sides[k].contains(o.sides[k])) return false;
    return true;
}

double DyadicCube::measure() const {
    double m = 1.0;
    for (const auto& s : sides) m *= std::ldexp(1.0, (int)-s.mu);
    return m;
}

std::vector<double> DyadicCube::center() const {
    std::vector<double> c(sides.size());
    for (std::size_t k = 0; k < sides.size(); ++k)
        c[k] = std::ldexp((double)sides[k].p + 0.5, (int)-sides[k].mu);
    return c;
}

bool DyadicRectangle::contains(const DyadicRectangle& o) const {
    if (cubes.size() != o.cubes.size()) return false;
    for (std::size_t i = 0; i < cubes.size(); ++i)
        if (!cubes[i].contains(o.cubes[i])) return false;
    return true;
}

double DyadicRectangle::measure() const {
    double m = 1.0;
    for (const auto& c : cubes) m *= c.measure();
    return m;
}

bool Box::contains_point(const std::vector<double>& x, double slack) const {
    for (std::size_t h = 0; h < lo.size(); ++h)
        if (x[h] < lo[h] - slack || x[h] > hi[h] + slack) return false;
    return true;
}

bool Box::contains_box(const Box& o, double slack) const {
    for (std::size_t h = 0; h < lo.size(); ++h)
        if (o.lo[h] < lo[h] - slack || o.hi[h] > hi[h] + slack) return false;
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t h = 0; h < lo.size(); ++h) v *= std::max(0.0, hi[h] - lo[h]);
    return v;
}

DyadicSystem::DyadicSystem(const Structure& s, AdmissibleSequence seq)
    : S_(&s), seq_(std::move(seq)) {}

DyadicSystem::DyadicSystem(const Structure& s) : S_(&s), seq_(s.exponents()) {}

DyadicCube DyadicSystem::cube_at(const std::vector<double>& x, int factor, long long ell) const {
    if (ell < 0) throw std::invalid_argument("cube_at: negative scale");
    DyadicCube c;
    c.factor = factor;
    c.ell = ell;
    for (int h : S_->exponents().blocks[factor]) {
        DyadicInterval iv;
        iv.mu = seq_.mu(ell, h);
        iv.p = (long long)std::floor(std::ldexp(x[h], (int)iv.mu));
        c.sides.push_back(iv);
    }
    return c;
}

DyadicRectangle DyadicSystem::rectangle_at(const std::vector<double>& x, const Lattice& L) const {
    DyadicRectangle r;
    r.L = L;
    for (int i = 0; i < S_->n(); ++i) r.cubes.push_back(cube_at(x, i, L[i]));
    return r;
}

DyadicCube DyadicSystem::dyadic_enlarge(const DyadicCube& c, long long m) const {
    const long long target = std::max(0LL, c.ell - m);
    DyadicCube out;
    out.factor = c.factor;
    out.ell = target;
    const auto& coords = S_->exponents().blocks[c.factor];
    for (std::size_t k = 0; k < coords.size(); ++k) {
        DyadicInterval iv;
        iv.mu = seq_.mu(target, coords[k]);
        const long long shift = c.sides[k].mu - iv.mu;
        if (shift < 0) throw std::logic_error("dyadic_enlarge: sequence not monotone");
        iv.p = c.sides[k].p >> shift;
        out.sides.push_back(iv);
    }
    return out;
}

DyadicRectangle DyadicSystem::dyadic_enlarge(const DyadicRectangle& r,
                                             const std::vector<long long>& m) const {
    DyadicRectangle out;
    out.L.resize(r.L.size());
    for (std::size_t i = 0; i < r.cubes.size(); ++i) {
        out.cubes.push_back(dyadic_enlarge(r.cubes[i], m[i]));
        out.L[i] = out.cubes.back().ell;
    }
    return out;
}

long long DyadicSystem::ancestor_multiplicity(const DyadicCube& c, long long m) const {
    // Enlargements by different m can name the same set when the sequence mu
    // stalls; report how many m' in [0, ell] give this ancestor as a set.
    DyadicCube ref = dyadic_enlarge(c, m);
    long long count = 0;
    for (long long mm = 0; mm <= c.ell; ++mm)
        if (dyadic_enlarge(c, mm).sides == ref.sides) ++count;
    return count;
}

Box DyadicSystem::rescale_enlarge(const DyadicCube& c, double rho) const {
    if (!(rho > 0)) throw std::domain_error("rescale_enlarge: rho must be positive");
    Box b;
    b.lo.assign(S_->dims(), 0.0);
    b.hi.assign(S_->dims(), 0.0);
    const auto& coords = S_->exponents().blocks[c.factor];
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const double center = std::ldexp((double)c.sides[k].p + 0.5, (int)-c.sides[k].mu);
        const double half = std::pow(2.0, rho) * std::ldexp(1.0, (int)-c.sides[k].mu);
        b.lo[coords[k]] = center - half;
        b.hi[coords[k]] = center + half;
    }
    return b;
}

Box DyadicSystem::rescale_enlarge(const DyadicRectangle& r,
                                  const std::vector<double>& rho_per_factor) const {
    Box b;
    b.lo.assign(S_->dims(), 0.0);
    b.hi.assign(S_->dims(), 0.0);
    for (std::size_t i = 0; i < r.cubes.size(); ++i) {
        Box part = rescale_enlarge(r.cubes[i], rho_per_factor[i]);
        for (int h : S_->exponents().blocks[(int)i]) {
            b.lo[h] = part.lo[h];
            b.hi[h] = part.hi[h];
        }
    }
    return b;
}

long long DyadicSystem::induced_nu(const MarkedPartition& S, int block, long long ell_dotted,
                                   int h) const {
    const auto& b = S.blocks[block];
    const int i = S_->factor_of(h);
    const long long ell_i = (Rational(ell_dotted) / S_->e(b.dotted, i)).floor();
    return seq_.mu(ell_i, h);
}

std::vector<BlockCube> DyadicSystem::s_view(const DyadicRectangle& r, const MarkedPartition& S,
                                            const ScaleLattice* lat) const {
    // The rectangle's scales must realize the floor relations of the class.
    for (const auto& b : S.blocks)
        for (int i : b.members)
            if (r.L[i] != (Rational(r.L[b.dotted]) / S_->e(b.dotted, i)).floor())
                throw std::invalid_argument("s_view: rectangle not in the partition's scale class");
    if (lat) {
        auto sc = lat->admit(r.L);
        if (!sc || !(sc->S == S))
            throw std::invalid_argument("s_view: scale not assigned to this partition");
    }
    std::vector<BlockCube> out;
    for (int rr = 0; rr < S.size(); ++rr) {
        const auto& b = S.blocks[rr];
        BlockCube bc;
        bc.block = rr;
        bc.scale = r.L[b.dotted];
        for (int i : b.members) {
            const auto& coords = S_->exponents().blocks[i];
            for (std::size_t k = 0; k < coords.size(); ++k) {
                bc.coords.push_back(coords[k]);
                bc.sides.push_back(r.cubes[i].sides[k]);
            }
        }
        out.push_back(std::move(bc));
    }
    return out;
}

Box DyadicSystem::rectangle_box(const DyadicRectangle& r) const {
    Box b;
    b.lo.assign(S_->dims(), 0.0);
    b.hi.assign(S_->dims(), 0.0);
    for (int i = 0; i < (int)r.cubes.size(); ++i) {
        const auto& coords = S_->exponents().blocks[i];
        for (std::size_t k = 0; k < coords.size(); ++k) {
            b.lo[coords[k]] = r.cubes[i].sides[k].lo();
            b.hi[coords[k]] = r.cubes[i].sides[k].hi();
        }
    }
    return b;
}

}  // namespace multinorm
