#pragma once

#include "fastdiff/evolve.hpp"

namespace fastdiff::detail {

// One step (plain or extrapolated) with a prebuilt scheme; accumulates
// Newton iterations and time-step halvings.
void step_with(const RadialScheme& scheme, EvolutionState& state, double dt, const StepOptions& opt, int& iterations,
               int& halvings);

}  // namespace fastdiff::detail

namespace fastdiff::detail {

// |S^{n-1}|, with |S^0| = 2.
double sphere_area(int n);
// Converts the scheme's cell masses into int u_B dx: |S^{n-1}| B^{n/2-a}.
double mass_factor(const ModelParams& params);

}  // namespace fastdiff::detail
