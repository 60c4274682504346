#include "uforge/metrics/ieu_bound.hpp"

#include <algorithm>
#include <cmath>

#include "uforge/numcore/error.hpp"

namespace uforge::metrics {

double ieu_retain_gap_bound(const IeuBoundInputs& in, double t) {
  if (!(in.mu > 0.0 && in.beta >= in.mu)) throw InvalidArgument("bound needs 0 < mu <= beta");
  const double a = 1.0 - in.alpha;
  const double inner = in.radius * a / 2.0 + in.lipschitz * in.c / (2.0 * in.beta) + in.lipschitz / in.beta;
  return in.lipschitz * in.radius * std::exp(-(in.mu / in.beta) * t) + 2.0 * in.beta * inner * inner +
         in.beta * a * a;
}

double max_half_distance(std::span<const ParamVector> states) {
  double best = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) best = std::max(best, distance(states[i], states[j]));
  }
  return best / 2.0;
}

}  // namespace uforge::metrics
