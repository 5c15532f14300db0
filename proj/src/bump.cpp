#include "multinorm/bump.hpp"

#include <cmath>

namespace multinorm {

namespace {

double expm_profile(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double smooth_transition(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double t = (r - a) / (b - a);
    const double up = expm_profile(1.0 - t);
    const double down = expm_profile(t);
    return up / (up + down);
}

double unit_bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

FactorProfile make_frequency_profile(double plateau, double support) {
    FactorProfile p;
    p.plateau = plateau;
    p.support = support;
    p.nu_radial = [plateau, support](double r) { return smooth_transition(r, plateau, support); };
    return p;
}

FactorProfile make_space_profile(int block_dims, double halfwidth) {
    FactorProfile p;
    p.halfwidth = halfwidth;
    p.phi_space = [halfwidth](const std::vector<double>& x) {
        double v = 1.0;
        for (double xh : x) v *= unit_bump(xh / halfwidth);
        return v;
    };
    (void)block_dims;
    return p;
}

}  // namespace multinorm
