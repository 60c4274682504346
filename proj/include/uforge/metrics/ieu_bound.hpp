#pragma once

#include <span>

#include "uforge/numcore/param_vector.hpp"

namespace uforge::metrics {

/// Constants of the retain-gap bound for the re-initializing update.
struct IeuBoundInputs {
  double mu = 0.0;
  double beta = 0.0;
  double alpha = 1.0;
  double c = 0.0;
  double lipschitz = 0.0;  // L
  double radius = 0.0;     // D
};

/// L*D*exp(-(mu/beta) t) + 2 beta (D(1-alpha)/2 + L c/(2 beta) + L/beta)^2 + beta (1-alpha)^2
double ieu_retain_gap_bound(const IeuBoundInputs& in, double t);

/// Largest pairwise half-distance max ||a - b|| / 2 over the states.
double max_half_distance(std::span<const ParamVector> states);

}  // namespace uforge::metrics
