#pragma once

#include <string>
#include <vector>

#include "multinorm/grid.hpp"
#include "multinorm/journe.hpp"
#include "multinorm/scales.hpp"

namespace multinorm {

// Binary array format: magic, rank, per-axis log2 sample counts and period
// exponents, then row-major complex doubles.  Lossless round trip.
void save_grid_binary(const SampledFunction& f, const std::string& path);
SampledFunction load_grid_binary(const std::string& path);

// CSV table of admissible scales: L, dotted set, assigned partition, tube.
std::string scales_csv(const ScaleLattice& lat, long long bound);

// Two-factor decomposition panel in (log2|xi1|, log2|xi2|) axes with the tube
// boundaries and the principal-cone edge lines.
std::string decomposition_svg_2d(const ScaleLattice& lat, long long bound);

// Three-factor projective triangle: sections of the dominance cones on the
// plane t1 + t2 + t3 = 1.
std::string cone_triangle_svg(const PartitionTable& parts);

// Norm-vs-window polylines, one per labelled series.
struct NormCurve {
    std::string label;
    std::vector<std::pair<long long, double>> points;  // (window, L1 norm)
};
std::string norm_curves_svg(const std::vector<NormCurve>& curves);

// Covering-model instances (open set, rectangle family, string) as JSON.
std::string journe_instance_to_json(const DyadicModel& m, const RandomModelInstance& inst,
                                    const std::vector<int>& string);
struct JourneInstanceFile {
    std::vector<int> depths;
    RandomModelInstance instance;
    std::vector<int> string;
};
JourneInstanceFile journe_instance_from_json(const std::string& text);

}  // namespace multinorm
