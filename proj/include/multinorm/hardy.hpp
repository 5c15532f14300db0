#pragma once

#include <map>
#include <string>
#include <vector>

#include "multinorm/squarefn.hpp"

namespace multinorm {

// A three-tier atom: uncancelled unit atom (no dotted entries), single-dotted
// cube atom, or multi-dotted atom carrying an open set and pre-atoms.
struct Atom {
    MarkedPartition S;  // empty for the unit kind
    double tau = 1.0;
    SampledFunction payload;

    // kind 0 only: integer corner of the carrying unit cube.
    std::vector<long long> unit_corner;
    // kind 1 only: the carrying rectangle.
    DyadicRectangle rect;
    // kind >= 2: the associated open set (its maximal rectangles) and the
    // pre-atom split indexed by them.
    std::vector<DyadicRectangle> omega;
    double omega_measure = 0;
    std::vector<std::pair<DyadicRectangle, SampledFunction>> preatoms;

    int kind() const { return S.empty() ? 0 : (S.size() == 1 ? 1 : 2); }
};

struct AtomValidation {
    bool pass = false;
    bool borderline = false;  // fails only within 10x of the tolerance
    double support_excess = 0;        // worst payload mass outside the allowed box
    double l2_excess = 0;             // (||a||_2 - bound)/bound, clamped at 0
    double cancellation_residual = 0; // worst relative dotted block moment
    double partition_excess = 0;      // worst (sum ||a_Dj||^2)|Omega| - 1, clamped
    std::vector<std::string> failures;
};

// Everything the Hardy-space pipeline needs bound together: the lattice, the
// dyadic geometry, a space-localized family for the decomposition and a
// frequency-localized one defining the norm.
struct HardyContext {
    const ScaleLattice* lat = nullptr;
    const DyadicSystem* dy = nullptr;
    const FamilyRealization* analysis = nullptr;  // space-localized tensor family
    const FamilyRealization* norm = nullptr;      // norm-defining tensor family

    const Structure& structure() const { return lat->structure(); }
};

double h1_norm(const HardyContext& ctx, const SampledFunction& f);

AtomValidation validate_atom(const HardyContext& ctx, const Atom& a, double tol,
                             std::uint64_t partition_seed = 7, int random_partitions = 8);

// Half-threshold enlargement by the dyadic-rectangle maximal operator over
// the window scales: the indicator of { sup_{R ni x} |R cap E|/|R| > 1/2 }.
std::vector<char> dyadic_half_enlarge(const HardyContext& ctx, const std::vector<char>& indicator);

struct DecomposeOptions {
    double tau = 1.0;
    double tol = 1e-8;
    int levels_cap = 40;
    std::uint64_t partition_seed = 7;
};

struct LevelDiagnostics {
    int level = 0;
    double omega_measure = 0;
    double omega_s_measure = 0;
};

struct Decomposition {
    std::vector<double> coeffs;
    std::vector<Atom> atoms;
    SampledFunction residual;
    double h1 = 0;              // norm-family square-function L1 norm of f
    double coeff_sum = 0;       // sum |lambda|
    double recon_error_l2 = 0;  // ||sum lambda a + residual - f||_2 (grid identity check)
    double residual_l2 = 0;
    double eps_used = 0;        // support calibration actually applied
    std::vector<LevelDiagnostics> levels;
    std::size_t borderline_atoms = 0;
};

Decomposition atomic_decompose(const HardyContext& ctx, const SampledFunction& f,
                               const DecomposeOptions& opt = {});

// Random valid atoms for the converse-evidence runs.
Atom make_unit_atom(const HardyContext& ctx, std::uint64_t seed, double tau);
Atom make_single_dotted_atom(const HardyContext& ctx, const MarkedPartition& S,
                             std::uint64_t seed, double tau);

}  // namespace multinorm
