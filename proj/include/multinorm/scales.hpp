#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multinorm/partitions.hpp"

namespace multinorm {

using Lattice = std::vector<long long>;

// An admissible scale: a lattice point whose unit cube is maximal within its
// dominance class, together with its dotted set and assigned partition.
struct Scale {
    Lattice L;
    std::vector<int> D;         // dotted set of the class (empty for L = 0)
    MarkedPartition S;          // assigned partition (empty symbol for L = 0)

    bool is_origin() const;
};

// Tube T_L in R^n_+: side [l_j - 1/2, l_j + 1/2] in dotted directions and
// [0, l_j + 1/2] otherwise.  Bounds are exact rationals.
struct Tube {
    RationalVec lo, hi;
    bool contains(const RationalVec& t) const;
    bool intersects(const Tube& o) const;
};

// Frequency block B_L described by per-factor modulus constraints, plus the
// product-form inner/outer boxes with matrix-dependent constants.
struct FrequencyBlock {
    Lattice L;
    std::vector<int> D;
    // |xi_i| in [2^{lo2[i]}, 2^{hi2[i]}]; lo2[i] unconstrained (-inf) encoded
    // by has_lower[i] = false.
    std::vector<double> lo2, hi2;
    std::vector<bool> has_lower;
    // Sandwich constants: inner c = 2^{-emax/2}, outer C = 2^{emax/2}, lower
    // radius 2^{-1/2} on both sides.
    double inner_c, outer_C;
};

struct TubeCoverReport {
    long long checked = 0;
    std::vector<Lattice> violations;  // lattice points covered != exactly once
    bool ok() const { return violations.empty(); }
};

struct KappaReport {
    // Window maxima realizing the four distance bounds, with witnesses.
    Rational kappa1;  // max distance from admissible L to Gamma(E)
    Rational kappa2;  // max distance from Gamma(E) window samples to the lattice
    Rational kappa3;  // max distance from L ^ L' to the lattice
    Rational kappa4;  // max |L - L'| over pairs with intersecting tubes
    Lattice witness1, witness3a, witness3b, witness4a, witness4b;
    RationalVec witness2;
    // Crude proof-side bound delta = max e(i,j), reported for context.
    Rational delta_bound;
};

class ScaleLattice {
public:
    ScaleLattice(const Structure& s, const PartitionTable& parts);

    const Structure& structure() const { return *S_; }
    const PartitionTable& partitions() const { return *parts_; }

    // Admissibility: dominance classification of L followed by the exact
    // maximality test.  Returns the rejected point's diagnosis otherwise.
    std::optional<Scale> admit(const Lattice& L) const;

    // All admissible scales with every coordinate <= bound, sorted.
    std::vector<Scale> enumerate(long long bound) const;
    // The same, grouped by assigned partition (keyed by serialized form).
    std::map<std::string, std::vector<Scale>> enumerate_grouped(long long bound) const;

    Tube tube(const Scale& sc) const;

    // The maximal scale whose tube contains the lattice point M.
    Scale tube_owner(const Lattice& M) const;

    // Exhaustively checks that every lattice cube in the window lies in
    // exactly one tube.
    TubeCoverReport tube_cover_check(long long bound) const;

    KappaReport kappa_diagnostics(long long bound) const;

    // Exact sup-distance from a rational point to Gamma(E).
    Rational distance_to_principal_cone(const RationalVec& t) const;
    // Exact sup-distance from a rational point to the admissible lattice
    // (search over a sufficient window around t).
    Rational distance_to_lattice(const RationalVec& t) const;

    FrequencyBlock frequency_block(const Scale& sc) const;
    // Maps a frequency-space point to the scale owning it (scale 0 for B(1)).
    Scale block_membership(const std::vector<double>& xi) const;

private:
    const Structure* S_;
    const PartitionTable* parts_;

    MarkedPartition assign_partition(const Lattice& L, const std::vector<int>& D) const;

public:
    // Definitional maximality: L in Gamma(D) and no unit step off D stays in
    // Gamma(D).  Used as the brute-force cross-check.
    bool maximal_by_definition(const Lattice& L) const;
    // The floor/strict-tau characterization of maximal cubes for a witness
    // partition.  Equivalent to maximality away from dominance ties; kept as
    // a diagnostic because the strict tau clause can fail at ties.
    bool eq36_conditions(const Lattice& L, const MarkedPartition& witness) const;
    bool cone_contains_point(const MarkedPartition& p, const RationalVec& t) const;
};

}  // namespace multinorm
