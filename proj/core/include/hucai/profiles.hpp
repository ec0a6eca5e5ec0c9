#pragma once

// Named analytic source and initial-conductance profiles on the unit square.

#include <string>
#include <vector>

#include "hucai/grid.hpp"

namespace hucai {

/// Known names:
///   zero      s = 0
///   constant  s = amplitude
///   bump      s = amplitude * exp(-|x - (1/2, 1/2)|^2 / (2 width^2))
///   sine      s = amplitude * sin(pi x) sin(pi y)
ScalarField source_profile(const std::string& name, const Grid2D& g, double amplitude = 1.0,
                           double width = 0.15);

/// Known names (all vanish on the boundary of the unit square):
///   zero
///   sine    amplitude * (sin(2 pi x) sin(pi y), sin(pi x) sin(2 pi y))
///   bubble  amplitude * (sin(pi x) sin(pi y), sin(pi x) sin(pi y))
/// Values on boundary nodes are set to exactly 0.
VectorField2 conductance_profile(const std::string& name, const Grid2D& g, double amplitude = 1.0);

const std::vector<std::string>& source_profile_names();
const std::vector<std::string>& conductance_profile_names();

}  // namespace hucai
