#pragma once

#include <map>
#include <string>
#include <vector>

#include "multinorm/calderon.hpp"

namespace multinorm {

// An evaluable multiplier symbol with optional name, validated against the
// product-norm derivative inequalities by finite differences.
struct Multiplier {
    Symbol m;
    std::string name;
};

struct MultiplierSampleSet {
    std::size_t count = 512;
    double radius = 32.0;   // samples drawn with |xi_h| <= radius
    std::uint64_t seed = 2024;
};

struct MultiplierOrderReport {
    std::vector<int> alpha;
    double constant = 0;        // max over samples of |d^a m| prod (1+Nhat_i)^{[[a^i]]}
    double constant_dense = 0;  // same at doubled radius/sample count
    bool finite = true;
};

struct MultiplierReport {
    std::vector<MultiplierOrderReport> orders;
    bool passed = false;
    // Pass rule: every constant finite and the doubled-radius constant grows
    // by at most growth_cap (+ absolute slack).
    double growth_cap = 1.6;
};

MultiplierReport validate_multiplier(const Structure& s, const Multiplier& mult, int max_order = 3,
                                     const MultiplierSampleSet& samples = {});

// Dyadic synthesis: m_L(xi) = m(2^L xi) PsiHat_L(xi); application is the
// spectrum multiplication by sum_L m_L(2^-L xi) = m * (window band projection).
class DyadicKernel {
public:
    DyadicKernel(const FamilyRealization& fam, const Multiplier& m);

    const FamilyRealization& family() const { return *fam_; }
    // Per-scale piece at grid frequencies (already rescaled to 2^-L xi form);
    // assembled on demand.
    std::vector<cplx> piece(std::size_t scale_index) const;
    // Sum of all pieces: the synthesized symbol at grid frequencies.
    const std::vector<cplx>& synthesized() const { return total_; }

    SampledFunction apply(const SampledFunction& f) const;
    // Direct application of the raw symbol restricted to the window band
    // (for the two-path comparison).
    SampledFunction apply_direct(const SampledFunction& f) const;

    // max |m_L| over grid frequencies on the subspace xi_{k_r} = 0 of each
    // dotted index of its scale; zero for a valid synthesis.
    double max_on_vanishing_subspaces() const;

private:
    const FamilyRealization* fam_;
    Multiplier m_;
    std::vector<cplx> mvals_;
    std::vector<cplx> total_;
};

// Smooth homogeneous norm |x| for a one-parameter dilation family with the
// given coordinate exponents: the unique r with sum (r^-a_h x_h)^2 = 1.
double smooth_homogeneous_norm(const std::vector<double>& exponents, const std::vector<double>& x);

// Local Riesz-type symbol for the i-th dual dilation family and scalar
// coordinate j: xi_j / |xi|^{a_j} cut off near the origin.
Multiplier riesz_local(const Structure& s, int i, int j);
// Product of per-factor local symbols (identity factors for j = -1).
Multiplier riesz_product(const Structure& s, const std::vector<int>& coords);

// Local Mihlin-Hormander symbol for one dual dilation family (used by the
// product-closure checks): a zero-homogeneous oscillating symbol cut off at
// the origin.
Multiplier local_mihlin_symbol(const Structure& s, int i);

// Expression mini-format for pluggable multipliers, grammar version 1:
//
//   expression := product (('+'|'-') product)*
//   product    := unary (('*'|'/') unary)*
//   unary      := '-' unary | atom
//   atom       := NUMBER | 'abs' INDEX | 'nhat' INDEX | 'norm' INDEX
//               | '(' expression ')'
//               | 'cutoff' '(' expression ',' NUMBER ',' NUMBER ')'
//               | 'pow' '(' expression ',' NUMBER ')'
//
// 'absI' is the block norm |xi_I|, 'nhatI' the dual max-norm Nhat_I, 'normI'
// the smooth homogeneous norm of the I-th dual dilations (1-based factor
// index; prefer it inside symbols meant to pass the derivative validator,
// since the max-norm has kinks), 'cutoff(e,a,b)' the smooth transition equal
// to 1 where e <= a and 0 where e >= b, 'pow(e,q)' the power |e|^q.
// Throws std::invalid_argument on malformed sources.
inline constexpr int kMultiplierGrammarVersion = 1;
Multiplier parse_multiplier(const Structure& s, const std::string& source);

}  // namespace multinorm
