#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "multinorm/rational.hpp"

namespace multinorm {

// Finite exact s-factor dyadic model: factor r is the unit interval carrying
// dyadic subintervals down to depth D_r; open sets are unions of finest
// cells, measures are exact rationals with denominator 2^{sum D_r}.
class DyadicModel {
public:
    explicit DyadicModel(std::vector<int> depths);

    int factors() const { return (int)depths_.size(); }
    int depth(int r) const { return depths_[r]; }
    std::size_t cells() const { return cells_; }
    std::size_t cells_per_factor(int r) const { return std::size_t(1) << depths_[r]; }

    // A dyadic rectangle: per factor, a depth and an offset.
    struct Rect {
        std::vector<int> level;        // 0 = whole interval .. depth
        std::vector<long long> offset; // 0 .. 2^level - 1
        bool operator==(const Rect& o) const { return level == o.level && offset == o.offset; }
        bool operator<(const Rect& o) const {
            return std::tie(level, offset) < std::tie(o.level, o.offset);
        }
    };

    Rational rect_measure(const Rect& r) const;
    bool rect_contains(const Rect& outer, const Rect& inner) const;
    Rect parent_in(const Rect& r, int factor, int steps) const;  // dyadic enlargement

    // Cell-set representation of finite unions.
    using CellSet = std::vector<char>;  // indexed by flat finest-cell id
    CellSet empty_set() const { return CellSet(cells_, 0); }
    void paint(CellSet& set, const Rect& r) const;
    Rational measure(const CellSet& set) const;
    long long count_inside(const CellSet& set, const Rect& r) const;  // cells of r in set
    long long rect_cells(const Rect& r) const;

    // All dyadic rectangles of the model.
    std::vector<Rect> all_rects() const;

private:
    std::vector<int> depths_;
    std::size_t cells_;
    std::vector<std::size_t> strides_;

    void cell_range(const Rect& r, int factor, long long& lo, long long& hi) const;
};

struct OpenSetModel {
    DyadicModel::CellSet cells;
    Rational measure;
};

// Half-threshold dyadic strong-maximal enlargement (one step).
OpenSetModel standard_enlarge(const DyadicModel& m, const OpenSetModel& omega);
// Iterated version Omega^(j).
OpenSetModel standard_enlarge(const DyadicModel& m, const OpenSetModel& omega, int j);

// Embeddedness factor: largest k with |2^{k e_r} R cap Omega| > 1/2 |2^{k e_r} R|.
struct Embeddedness {
    long long mu = 0;
    bool capped = false;  // scan reached the tree root
};
Embeddedness embeddedness(const DyadicModel& m, const OpenSetModel& omega,
                          const DyadicModel::Rect& rect, int factor);

// N-string enlargement state per the iterated embeddedness recursion.
struct EnlargementState {
    std::vector<int> string;                         // factor indices r_1..r_N
    std::vector<DyadicModel::Rect> rects;            // the family U
    std::vector<std::vector<long long>> m_final;     // m^(N) per rectangle
    std::vector<std::vector<std::vector<long long>>> m_history;  // per step
    std::vector<OpenSetModel> omega_steps;           // Omega^(0..N+1)
    Rational omega_bar_measure;   // | union 2^{m^N} R |
    Rational omega_hat_measure;   // rescaling-enlargement analogue (grid-free proxy)
};

EnlargementState string_enlarge(const DyadicModel& m, const OpenSetModel& omega,
                                const std::vector<DyadicModel::Rect>& family,
                                const std::vector<int>& string);

// Whether the string contains every subset (complete) or one given subset.
bool string_contains(const std::vector<int>& string, const std::vector<int>& subset);
bool string_complete(const std::vector<int>& string, int s);
std::vector<int> default_complete_string(int s);

struct CarberySeegerPoint {
    std::vector<long long> mprime;
    Rational lhs;         // sum |R'| |sh(Vbar)|
    double ratio;         // lhs / |Omega|
};

struct CarberySeegerReport {
    std::vector<CarberySeegerPoint> points;
    double fitted_p = 0;      // envelope log-log growth exponent vs (1 + |m'|)
    double least_C = 0;       // minimal C for the fitted exponent
    double least_C_p2 = 0;    // minimal C with the exponent pinned at 2
    bool shadows_agree = true;  // inclusion-exclusion vs cell enumeration
};

CarberySeegerReport carbery_seeger_check(const DyadicModel& m, const EnlargementState& state,
                                         const std::vector<int>& B, long long mprime_cap);

// Random open set / rectangle family generator for the empirical suites.
struct RandomModelInstance {
    OpenSetModel omega;
    std::vector<DyadicModel::Rect> family;
};
RandomModelInstance random_instance(const DyadicModel& m, std::uint64_t seed, int rect_count);

}  // namespace multinorm
