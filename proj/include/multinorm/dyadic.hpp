#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "multinorm/scales.hpp"

namespace multinorm {

// Integer side-length exponents mu(l,h) ~ l*lambda_h making anisotropic
// dyadic cubes possible for irrational-ratio exponents.  The default is
// mu(l,h) = floor(l*lambda_h); alternatives are injectable for the induced
// block-view sequences.
class AdmissibleSequence {
public:
    AdmissibleSequence() = default;
    explicit AdmissibleSequence(const Exponents& exps);  // default floor(l*lambda_h)
    AdmissibleSequence(std::function<long long(long long, int)> mu, int dims);

    long long mu(long long ell, int h) const { return mu_(ell, h); }
    int dims() const { return dims_; }

    // Checks monotonicity, mu(0,h)=0 and |mu(l,h) - l*lambda_h| <= a over the
    // given range; returns the smallest admissibility constant found.
    double validate(const Exponents& exps, long long max_ell) const;

private:
    std::function<long long(long long, int)> mu_;
    int dims_ = 0;
};

// Half-open interval [p*2^-mu, (p+1)*2^-mu) stored exactly as a dyadic
// rational pair.
struct DyadicInterval {
    long long p = 0;
    long long mu = 0;
    double lo() const { return std::ldexp((double)p, (int)-mu); }
    double hi() const { return std::ldexp((double)(p + 1), (int)-mu); }

    // Exact containment/equality via mantissa comparison.
    bool contains(const DyadicInterval& o) const;
    bool operator==(const DyadicInterval& o) const { return p == o.p && mu == o.mu; }
};

// A dyadic cube in factor i at scale index ell: one interval per scalar
// coordinate of the factor.
struct DyadicCube {
    int factor = 0;
    long long ell = 0;
    std::vector<DyadicInterval> sides;  // indexed like the factor's coordinate list

    bool operator==(const DyadicCube& o) const {
        return factor == o.factor && ell == o.ell && sides == o.sides;
    }
    bool contains(const DyadicCube& o) const;
    double measure() const;
    std::vector<double> center() const;
};

// Product of per-factor dyadic cubes at an admissible multi-scale.
struct DyadicRectangle {
    Lattice L;
    std::vector<DyadicCube> cubes;  // one per factor

    bool operator==(const DyadicRectangle& o) const { return L == o.L && cubes == o.cubes; }
    bool contains(const DyadicRectangle& o) const;
    double measure() const;
};

// Axis-aligned box with real endpoints; the result of rescaling enlargements.
struct Box {
    std::vector<double> lo, hi;  // indexed by scalar coordinate
    bool contains_point(const std::vector<double>& x, double slack = 0.0) const;
    bool contains_box(const Box& o, double slack = 0.0) const;
    double volume() const;
};

// The block view of a rectangle: per marked-partition block, the cube it
// forms for the block dilations, with the induced admissible sequence.
struct BlockCube {
    int block = 0;          // index into the partition's blocks
    long long scale = 0;    // the dotted entry's scale index
    std::vector<int> coords;            // scalar coordinates covered, in order
    std::vector<DyadicInterval> sides;  // matching coords
};

class DyadicSystem {
public:
    DyadicSystem(const Structure& s, AdmissibleSequence seq);
    explicit DyadicSystem(const Structure& s);

    const Structure& structure() const { return *S_; }
    const AdmissibleSequence& sequence() const { return seq_; }

    DyadicCube cube_at(const std::vector<double>& x, int factor, long long ell) const;
    DyadicRectangle rectangle_at(const std::vector<double>& x, const Lattice& L) const;

    // Unique ancestor at scales reduced by m (clamped at scale 0).
    DyadicCube dyadic_enlarge(const DyadicCube& c, long long m) const;
    DyadicRectangle dyadic_enlarge(const DyadicRectangle& r, const std::vector<long long>& m) const;
    // Number of distinct m in [0, ell] giving this same ancestor set.
    long long ancestor_multiplicity(const DyadicCube& c, long long m) const;

    // Box centered at the cube center with half-sides 2^rho * 2^-mu.
    Box rescale_enlarge(const DyadicCube& c, double rho) const;
    Box rescale_enlarge(const DyadicRectangle& r, const std::vector<double>& rho_per_factor) const;

    // Block view of a rectangle whose multi-scale lies in the partition's
    // scale class; the induced sequence nu(l,h) = mu(floor(l/e(k_r,i)), h).
    // When a lattice is supplied, class membership is decided by it (the
    // scale must be admissible with assigned partition S); otherwise only the
    // floor relations are checked.
    std::vector<BlockCube> s_view(const DyadicRectangle& r, const MarkedPartition& S,
                                  const ScaleLattice* lat = nullptr) const;
    long long induced_nu(const MarkedPartition& S, int block, long long ell_dotted, int h) const;

    // Geometry of the whole rectangle as a box (exact dyadic endpoints).
    Box rectangle_box(const DyadicRectangle& r) const;

private:
    const Structure* S_;
    AdmissibleSequence seq_;
};

}  // namespace multinorm
