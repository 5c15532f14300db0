#pragma once

#include <optional>
#include <string>
#include <vector>

#include "multinorm/core.hpp"

namespace multinorm {

// A partition of {0,...,n-1} with one dotted representative per block.
// Blocks are kept in canonical order (sorted by smallest member, members
// sorted ascending), so equality and lexicographic comparison are structural.
struct MarkedPartition {
    struct Block {
        std::vector<int> members;
        int dotted = -1;
    };
    std::vector<Block> blocks;

    int n() const;
    int size() const { return (int)blocks.size(); }  // number of blocks s
    bool empty() const { return blocks.empty(); }    // the S = {} symbol

    std::vector<int> dotted_set() const;  // D(S), sorted
    int block_of(int i) const;            // index of the block containing i

    void canonicalize();
    bool operator==(const MarkedPartition& o) const;
    bool operator<(const MarkedPartition& o) const;  // canonical-encoding lex order

    // Serialized as e.g. "{1.,3}{2.}" with 1-based indices, dot after the
    // dotted entry.
    std::string to_string() const;
    static MarkedPartition parse(const std::string& s);

    static MarkedPartition principal(int n);
    static std::vector<MarkedPartition> enumerate(int n);
};

// One homogeneous rational inequality a . t <= 0 (or < 0 when strict).
struct LinearConstraint {
    RationalVec a;
    bool strict = false;

    // "a1*t1 + ... + an*tn <= 0" with exact rational coefficients.
    std::string to_string() const;

    bool satisfied(const RationalVec& t) const {
        Rational s(0);
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * t[i];
        return strict ? s < Rational(0) : s <= Rational(0);
    }
};

// A dominance cone in R^n_+, kept as two equivalent exact constraint systems:
// the defining one and the reduced one (dotted-entry comparisons via tau).
struct Cone {
    std::vector<LinearConstraint> full;
    std::vector<LinearConstraint> reduced;

    bool contains(const RationalVec& t) const {
        for (const auto& c : full)
            if (!c.satisfied(t)) return false;
        return true;
    }
    bool contains_reduced(const RationalVec& t) const {
        for (const auto& c : reduced)
            if (!c.satisfied(t)) return false;
        return true;
    }

    // The defining system as printable homogeneous inequalities.
    std::vector<std::string> export_inequalities() const;
};

// Result of classifying a nonzero point of R^n_+: the minimal dotted set and
// a canonical witness partition realizing it.
struct Dominance {
    std::vector<int> D;
    MarkedPartition witness;
};

// All marked-partition machinery for a fixed structure.  Enumeration results
// are computed once and cached; every query is exact.
class PartitionTable {
public:
    explicit PartitionTable(const Structure& s);

    const Structure& structure() const { return *S_; }
    const std::vector<MarkedPartition>& all() const { return all_; }           // S_n
    const std::vector<MarkedPartition>& nonempty_interior() const { return sE_; }  // S_E

    bool in_sE(const MarkedPartition& p) const;

    // tau_S(k_p, k_q) = min_{l in A_q} e(k_p,l)/e(k_q,l).
    Rational tau(const MarkedPartition& p, int bp, int bq) const;

    Cone cone_gamma(const MarkedPartition& p) const;
    Cone principal_cone() const;  // Gamma(E)

    bool cone_interior_nonempty(const MarkedPartition& p) const;
    // A rational point strictly inside Gamma_S, when the interior is nonempty.
    std::optional<RationalVec> interior_point(const MarkedPartition& p) const;

    // Minimal dotted set of a nonzero point (nullopt for t = 0, where the
    // dotted set is empty by convention).
    std::optional<Dominance> dominant_set(const RationalVec& t) const;

    // Membership in Gamma(D) = { t != 0 : D(t) = D }.
    bool gamma_D_contains(const std::vector<int>& D, const RationalVec& t) const;

    // Faces F_S = Gamma_S cap Gamma(E) and F(D) = Gamma(D) cap Gamma(E).
    bool face_contains(const MarkedPartition& p, const RationalVec& t) const;
    bool face_D_contains(const std::vector<int>& D, const RationalVec& t) const;

    // Partitions in S_E with dotted set D.
    std::vector<MarkedPartition> with_dotted_set(const std::vector<int>& D) const;

private:
    const Structure* S_;
    std::vector<MarkedPartition> all_;
    std::vector<MarkedPartition> sE_;
};

}  // namespace multinorm
