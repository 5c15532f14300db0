#pragma once

#include <string>
#include <vector>

#include "multinorm/calderon.hpp"
#include "multinorm/dyadic.hpp"

namespace multinorm {

// Seeded test corpus: single-block bumps, band-limited trigonometric
// polynomials, cancellative near-atoms on dyadic rectangles, and mollified
// approximate point masses.
struct Corpus {
    std::vector<SampledFunction> functions;
    std::vector<std::string> names;
};

Corpus make_corpus(const Structure& s, const ScaleLattice& lat, const DyadicSystem& dy,
                   const GridGeometry& g, long long window, std::uint64_t seed,
                   std::size_t per_kind = 5);

}  // namespace multinorm
