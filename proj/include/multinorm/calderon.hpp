#pragma once

#include <map>
#include <memory>
#include <vector>

#include "multinorm/bump.hpp"
#include "multinorm/grid.hpp"
#include "multinorm/scales.hpp"

namespace multinorm {

enum class ProfileMode { FrequencyLocalized, SpaceLocalized };
enum class FamilyKind { Tensor, Convolution };

struct FamilyOptions {
    FamilyKind kind = FamilyKind::Tensor;
    ProfileMode mode = ProfileMode::FrequencyLocalized;
    int cancellation = 4;          // m; tilded members built with M = m+1
    double freq_plateau = 0.5;     // nu = 1 on [0, plateau]
    double freq_support = 2.0;     // nu supported in [0, support)
    double space_halfwidth = 0.125;
};

// Pointwise Rychkov algebra on tabulated transforms: everything is derived
// from the arrays nu_l (the transform of the l-th rescaled mollifier) by
// exact polynomial operations, so the reproducing identities hold to rounding
// by construction.
namespace rychkov {
std::vector<cplx> mu(const std::vector<cplx>& nu_l, const std::vector<cplx>* nu_prev);
std::vector<cplx> nu_tilde(const std::vector<cplx>& nu_l, int M);
std::vector<cplx> mu_tilde(const std::vector<cplx>& nu_l, const std::vector<cplx>* nu_prev, int M);
}  // namespace rychkov

// One dilation family's algebra with cached scale arrays (used directly for
// the one-parameter checks and per factor inside tensor families).
class DilationAlgebra {
public:
    DilationAlgebra(std::vector<std::vector<cplx>> nu, int M);

    long long max_scale() const { return (long long)nu_.size() - 1; }
    const std::vector<cplx>& nu(long long ell) const { return nu_[ell]; }
    std::vector<cplx> mu(long long ell) const {
        return rychkov::mu(nu_[ell], ell > 0 ? &nu_[ell - 1] : nullptr);
    }
    std::vector<cplx> nu_tilde(long long ell) const { return rychkov::nu_tilde(nu_[ell], M_); }
    std::vector<cplx> mu_tilde(long long ell) const {
        return rychkov::mu_tilde(nu_[ell], ell > 0 ? &nu_[ell - 1] : nullptr, M_);
    }
    int order() const { return M_; }

private:
    std::vector<std::vector<cplx>> nu_;
    int M_;
};

// A realized multi-norm reproducing family on a fixed grid and scale window.
// Tensor members factor through cached per-factor subgrid arrays; convolution
// members evaluate the dual-norm profile through a cached Nhat table (the
// profiles are norm-radial, so rescaling is a scalar multiplication).  Member
// transforms are assembled on demand to keep memory flat.
class FamilyRealization {
public:
    FamilyRealization(const ScaleLattice& lat, GridGeometry grid, long long window,
                      FamilyOptions opt);

    const Structure& structure() const { return *S_; }
    const ScaleLattice& lattice() const { return *lat_; }
    const GridGeometry& grid() const { return grid_; }
    const FamilyOptions& options() const { return opt_; }
    long long window() const { return window_; }

    // Scales whose tube meets the window box [0, W]^n.
    const std::vector<Scale>& scales() const { return scales_; }

    std::vector<cplx> psi_hat(std::size_t scale_index) const;
    std::vector<cplx> psi_tilde_hat(std::size_t scale_index) const;
    std::vector<cplx> phi_hat(const Lattice& L) const;
    std::vector<cplx> phi_tilde_hat(const Lattice& L) const;

    // Convolution-type term for an arbitrary lattice point of N^n (the
    // ungrouped n-fold hat-convolution); convolution kind only.
    std::vector<cplx> ungrouped_term_hat(const Lattice& M) const;

    SampledFunction member(std::size_t scale_index, bool tilded) const;
    SampledFunction convolve_member(const SampledFunction& f, std::size_t scale_index,
                                    bool tilded) const;

    // Per-factor algebra access (tensor kind).
    const DilationAlgebra& factor_algebra(int i) const { return *factor_alg_[i]; }
    const GridGeometry& factor_grid(int i) const { return factor_grids_[i]; }
    const std::vector<std::size_t>& factor_index_map(int i) const { return factor_map_[i]; }

private:
    const Structure* S_;
    const ScaleLattice* lat_;
    GridGeometry grid_;
    long long window_;
    FamilyOptions opt_;
    std::vector<Scale> scales_;
    long long max_ell_ = 0;

    // Tensor kind.
    std::vector<GridGeometry> factor_grids_;
    std::vector<std::vector<std::size_t>> factor_map_;
    std::vector<std::unique_ptr<DilationAlgebra>> factor_alg_;
    // Convolution kind: cached Nhat_i at grid frequencies.
    std::vector<std::vector<double>> nhat_;

    void build_tensor();
    void build_convolution();
    std::vector<cplx> conv_nu(int i, long long ell) const;
    std::vector<cplx> assemble(const Lattice& L, const std::vector<int>& D, bool tilded) const;
};

struct ReproducingReport {
    double max_residual = 0.0;       // |tilded partial sum - 1| over mid-band probes
    double max_residual_lp = 0.0;    // untilded version
    std::size_t probes = 0;
};

// Evaluates both partial-sum identities at every mid-band grid frequency
// (|xi_h| <= 2^{W-2}).
ReproducingReport verify_reproducing(const FamilyRealization& fam);

// Telescoping check of the one-parameter algebra at all grid frequencies.
double telescoping_residual(const DilationAlgebra& alg, long long up_to);

struct CollapseResult {
    RationalVec t_tilde;    // componentwise min_i e(j,i) l_i
    Lattice L;              // admissible scale used for the collapse
    Symbol k_hat;           // transform of the collapsed profile
    double seminorm_ratio;  // grid seminorm of k over the product of factors
};

CollapseResult convolution_collapse(const ScaleLattice& lat, const GridGeometry& grid,
                                    const std::vector<Symbol>& factor_hats,
                                    const Lattice& hat_scales);

Lattice nearest_scale(const ScaleLattice& lat, const RationalVec& t);

// Stable addressing key for realized families: kind, matrix hash, window and
// cancellation order; versions cache files and golden artifacts.
std::string family_cache_key(const Structure& s, const FamilyOptions& opt, long long window);

}  // namespace multinorm
