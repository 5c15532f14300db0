#pragma once

#include <string>
#include <vector>

#include "multinorm/calderon.hpp"
#include "multinorm/dyadic.hpp"

namespace multinorm {

// Pointwise square functions over a realized family window.  Per-scale
// contributions are reduced by deterministic pairwise summation.
SampledFunction s_tensor(const SampledFunction& f, const FamilyRealization& fam);
SampledFunction s_conv(const SampledFunction& f, const FamilyRealization& fam);
// Ungrouped convolution-type square function over the full lattice box
// [0, W]^n.
SampledFunction s_grid(const SampledFunction& f, const FamilyRealization& fam);
// Plancherel-Polya variant: per scale, the pointwise value is replaced by the
// sup over the containing dyadic rectangle.
SampledFunction s_pp(const SampledFunction& f, const FamilyRealization& fam,
                     const DyadicSystem& dy);

// Per-scale field |f * Psi_L^(-L)| promoted to its per-rectangle sup.
SampledFunction rectangle_sup(const SampledFunction& g, const DyadicSystem& dy, const Lattice& L);

struct StrongMaximalOptions {
    long long max_depth = 8;  // dyadic radii 2^-j, j = 0..max_depth
};

// Local strong maximal operator with dyadic radii; anisotropic boxes
// |y_h| <= r^lambda_h per factor radius r = 2^-j.
SampledFunction strong_maximal(const Structure& s, const SampledFunction& f,
                               const StrongMaximalOptions& opt = {});
// O(N^2)-per-point reference implementation for cross-checking.
SampledFunction strong_maximal_reference(const Structure& s, const SampledFunction& f,
                                         const StrongMaximalOptions& opt = {});

struct EquivalenceRow {
    std::string function_name;
    double tensor_a = 0, tensor_b = 0, conv = 0, grid = 0, pp = 0;  // L1 norms
};

struct SquareFunctionReport {
    std::vector<EquivalenceRow> rows;
    // max/min over corpus of the pairwise ratios (degenerate rows skipped).
    double tensor_ratio_spread = 0;   // between the two tensor families
    double conv_tensor_spread = 0;
    double grid_conv_spread = 0;
    double pp_tensor_spread = 0;
    std::uint64_t seed = 0;
    long long window = 0;
    std::size_t degenerate = 0;
};

SquareFunctionReport equivalence_report(const std::vector<SampledFunction>& corpus,
                                        const std::vector<std::string>& names,
                                        const FamilyRealization& tensor_a,
                                        const FamilyRealization& tensor_b,
                                        const FamilyRealization& conv,
                                        const DyadicSystem& dy, std::uint64_t seed);

}  // namespace multinorm
