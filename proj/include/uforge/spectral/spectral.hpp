#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "uforge/models/objective.hpp"
#include "uforge/numcore/param_vector.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::spectral {

/// Symmetric linear operator v -> A v.
using LinearOperator = std::function<ParamVector(const ParamVector&)>;

struct PowerResult {
  double eigenvalue = 0.0;  // Rayleigh quotient at `vector`
  ParamVector vector;       // unit norm
  int iterations = 0;
  double residual = 0.0;    // ||A v - lambda v|| / ||v||
  bool converged = false;
};

/// Power iteration for the eigenvalue of largest magnitude. Stops once
/// residual <= tol * scale, where scale defaults to |lambda| (or when the
/// operator annihilates the iterate).
/// The start vector is a Gaussian draw from `rng` unless `warm_start` is
/// given. Throws NonFiniteError if the operator returns non-finite values.
PowerResult power_iteration(const LinearOperator& op, std::size_t dim, double tol, int max_iter,
                            RngStream& rng, const ParamVector* warm_start = nullptr,
                            double scale = 0.0);

/// Dominant Hessian eigenvalue (by magnitude) at theta via HVP power iteration.
PowerResult lambda_max(const models::Objective& obj, const ParamVector& theta, double tol,
                       int max_iter, RngStream& rng, const ParamVector* warm_start = nullptr);

struct LambdaMinResult {
  double value = 0.0;
  bool psd_flag = false;
  PowerResult shifted;  // power iteration on (lambda_max I - H)
};

/// Smallest eigenvalue through the shifted operator lambda_max I - H. A null
/// shifted operator (isotropic Hessian) returns lambda_max with residual 0.
LambdaMinResult lambda_min(const models::Objective& obj, const ParamVector& theta, double lambda_max,
                           double tol, int max_iter, RngStream& rng);

struct SpectralConfig {
  double tol = 1e-10;
  int max_iter = 20000;
  /// Below this lambda_min the condition number is reported as undefined.
  double kappa_floor = 1e-12;
};

struct SpectralEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  std::optional<double> kappa;
  int iterations_used = 0;
  double residual = 0.0;
  bool psd_flag = false;
  bool converged = false;
};

/// Algebraic extremes of the Hessian spectrum at theta. When the dominant
/// eigenvalue is negative the two power-iteration results are swapped so
/// that lambda_max >= lambda_min always holds.
SpectralEstimate estimate_spectrum(const models::Objective& obj, const ParamVector& theta,
                                   const SpectralConfig& cfg, RngStream& rng);

/// kappa = lambda_max / lambda_min when the Hessian is PSD and lambda_min
/// clears the floor; otherwise a diagnostic explaining why it is undefined.
struct ConditionNumber {
  std::optional<double> value;
  std::string diagnostic;
};

ConditionNumber condition_number(const SpectralEstimate& est, double floor = 1e-12);

nlohmann::json to_json(const SpectralEstimate& est);

}  // namespace uforge::spectral
