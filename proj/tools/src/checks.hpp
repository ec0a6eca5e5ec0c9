#pragma once

// Parameter sweeps and refinement studies shared by the CLI modes and the
// acceptance suite.

#include <vector>

#include "hucai/heatpot.hpp"
#include "hucai/verify.hpp"

namespace hucai::app {

struct SweepResult {
    int evaluated = 0;
    int qualifying = 0;   ///< points meeting the sweep's hypothesis
    int violations = 0;   ///< qualifying points where the conclusion fails
};

/// 5 x 5 x 5 grid of (c, b, alpha); y0 at 1/2, 0.9 and exactly 1 times the
/// threshold must give a converging sequence.
SweepResult ynb_sweep();

/// eps_hat over half-decades 1e-6..1, five r values, five c values. Where the
/// condition holds, g(tau0) <= -eps_hat and two zeros of g bracket tau0.
SweepResult fixed_point_sweep();

/// Largest |u/t - F| / |F| for a constant source over t in {1e-3, 0.1, 1}.
double kernel_normalization_error(const HeatPotentialConfig& cfg);

/// Residuals of the manufactured Duhamel case at `levels` refinements:
/// panels, points per sigma and source resolution doubled, dt and h halved.
std::vector<double> duhamel_refinement(int levels, const HeatPotentialConfig& base);

}  // namespace hucai::app
