#include "uforge/harness/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "uforge/numcore/error.hpp"

namespace uforge::harness {

std::vector<double> constructed_spectrum(std::size_t d, double beta, double kappa, double min_ratio, RngStream& rng) {
  if (d == 0 || !(beta > 0.0) || !(kappa >= 1.0)) throw InvalidArgument("invalid spectrum request");
  std::vector<double> s(d);
  s.front() = beta;
  s.back() = beta / kappa;
  if (d == 1) return {beta};
  if (min_ratio > 1.0 && d > 2) {
    const double hi = beta / min_ratio;
    const double lo_gap = (beta - s.back()) / min_ratio;
    const double lo = std::max(beta - lo_gap, s.back());
    if (!(lo < hi)) throw InvalidArgument("gap constraints leave no room for interior eigenvalues");
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 1; i + 1 < d; ++i) s[i] = std::exp(llo + (lhi - llo) * rng.uniform());
    // Pin the neighbours of both extremes to the tightest allowed gaps.
    s[1] = hi;
    if (d > 3) s[d - 2] = lo;
  } else {
    const double llo = std::log(s.back());
    const double lhi = std::log(beta);
    for (std::size_t i = 1; i + 1 < d; ++i) s[i] = std::exp(llo + (lhi - llo) * rng.uniform());
  }
  std::sort(s.begin() + 1, s.end() - 1, std::greater<>());
  return s;
}

QuadraticOracle random_quadratic_oracle(RngStream& rng, std::size_t max_dim, double max_kappa) {
  if (max_dim < 2) throw InvalidArgument("oracle dimension must allow d >= 2");
  const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform_index(max_dim - 1));
  const double kappa = std::exp(std::log(max_kappa) * rng.uniform());
  const double beta = std::exp(std::log(0.1) + std::log(100.0) * rng.uniform());
  auto spectrum = constructed_spectrum(d, beta, kappa, 1.0, rng);
  ParamVector star(d);
  ParamVector start(d);
  normal_fill(star.span(), 1.0, rng);
  normal_fill(start.span(), 1.0, rng);
  const double l_star = 2.0 * rng.uniform() - 1.0;
  return QuadraticOracle{models::make_quadratic(std::move(spectrum), std::move(star), l_star), std::move(start)};
}

}  // namespace uforge::harness
