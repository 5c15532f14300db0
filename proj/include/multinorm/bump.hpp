#pragma once

#include <functional>
#include <vector>

#include "multinorm/core.hpp"

namespace multinorm {

// C-infinity transition built from exp(-1/t): equals 1 on [0, a], vanishes on
// [b, inf), strictly decreasing in between.
double smooth_transition(double r, double a, double b);

// Smooth compactly supported even bump on (-1,1), normalized to value 1 at 0.
double unit_bump(double t);

// Closed-form factor profiles generating the reproducing families.
struct FactorProfile {
    // Frequency side: nu(xi_i) radial in the block norm, 1 on [0, plateau],
    // supported in [0, support).
    std::function<double(double block_norm)> nu_radial;
    // Space side: normalized product bump per scalar coordinate, half-width w.
    std::function<double(const std::vector<double>& x_block)> phi_space;
    double plateau = 0.5;
    double support = 2.0;
    double halfwidth = 0.125;
};

FactorProfile make_frequency_profile(double plateau = 0.5, double support = 2.0);
FactorProfile make_space_profile(int block_dims, double halfwidth = 0.125);

}  // namespace multinorm
