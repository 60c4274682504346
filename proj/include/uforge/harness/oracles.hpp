#pragma once

#include <cstddef>
#include <vector>

#include "uforge/models/objective.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::harness {

/// Non-increasing spectrum of dimension d with lambda_1 = beta and
/// lambda_d = beta / kappa, interior eigenvalues log-uniform in between.
/// When min_ratio > 1 both lambda_1/lambda_2 and
/// (lambda_1 - lambda_d)/(lambda_1 - lambda_{d-1}) are at least min_ratio, and
/// lambda_2, lambda_{d-1} sit exactly at those limits.
std::vector<double> constructed_spectrum(std::size_t d, double beta, double kappa, double min_ratio, RngStream& rng);

struct QuadraticOracle {
  models::Objective objective;
  ParamVector theta0;
};

/// Random quadratic with 2 <= d <= max_dim, kappa log-uniform in [1, max_kappa],
/// beta log-uniform in [0.1, 10], optimum and start drawn from Normal(0, 1).
QuadraticOracle random_quadratic_oracle(RngStream& rng, std::size_t max_dim = 32, double max_kappa = 1e3);

}  // namespace uforge::harness
