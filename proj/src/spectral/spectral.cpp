#include "uforge/spectral/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "uforge/numcore/error.hpp"

namespace uforge::spectral {

PowerResult power_iteration(const LinearOperator& op, std::size_t dim, double tol, int max_iter,
                            RngStream& rng, const ParamVector* warm_start, double scale) {
  if (!(tol > 0.0)) throw InvalidArgument("power_iteration: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("power_iteration: max_iter must be >= 1");
  if (dim == 0) throw InvalidArgument("power_iteration: empty operator");

  ParamVector v(dim);
  if (warm_start != nullptr && warm_start->dim() == dim && norm2(*warm_start) > 0.0) {
    v = *warm_start;
  } else {
    normal_fill(v.span(), 1.0, rng);
  }
  scale_inplace(1.0 / norm2(v), v);

  PowerResult res;
  for (int k = 1; k <= max_iter; ++k) {
    ParamVector w = op(v);
    if (!w.all_finite()) throw NonFiniteError("Hessian-vector product returned non-finite values");
    const double lambda = dot(v, w);
    const double wn = norm2(w);
    double r2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = w[i] - lambda * v[i];
      r2 += r * r;
    }
    res.eigenvalue = lambda;
    res.residual = std::sqrt(r2);
    res.iterations = k;
    res.vector = v;
    if (wn == 0.0) {
      res.eigenvalue = 0.0;
      res.residual = 0.0;
      res.converged = true;
      return res;
    }
    if (res.residual <= tol * (scale > 0.0 ? scale : std::abs(lambda))) {
      res.converged = true;
      return res;
    }
    scale_inplace(1.0 / wn, w);
    v = std::move(w);
  }
  return res;
}

PowerResult lambda_max(const models::Objective& obj, const ParamVector& theta, double tol,
                       int max_iter, RngStream& rng, const ParamVector* warm_start) {
  const LinearOperator op = [&](const ParamVector& v) { return obj.hvp(theta, v); };
  return power_iteration(op, obj.dim(), tol, max_iter, rng, warm_start);
}

LambdaMinResult lambda_min(const models::Objective& obj, const ParamVector& theta, double lambda_max,
                           double tol, int max_iter, RngStream& rng) {
  const LinearOperator shifted = [&](const ParamVector& v) {
    ParamVector hv = obj.hvp(theta, v);
    for (std::size_t i = 0; i < hv.dim(); ++i) hv[i] = lambda_max * v[i] - hv[i];
    return hv;
  };
  // The shifted operator's top eigenvalue can be tiny next to lambda_max
  // (near-isotropic Hessians), so convergence is judged relative to lambda_max.
  LambdaMinResult out;
  out.shifted = power_iteration(shifted, obj.dim(), tol, max_iter, rng, nullptr,
                                std::max(std::abs(lambda_max), 1e-300));
  out.value = lambda_max - out.shifted.eigenvalue;
  out.psd_flag = out.value >= -tol * std::abs(lambda_max);
  return out;
}

SpectralEstimate estimate_spectrum(const models::Objective& obj, const ParamVector& theta,
                                   const SpectralConfig& cfg, RngStream& rng) {
  const PowerResult top = lambda_max(obj, theta, cfg.tol, cfg.max_iter, rng);
  const LambdaMinResult bottom = lambda_min(obj, theta, top.eigenvalue, cfg.tol, cfg.max_iter, rng);
  SpectralEstimate est;
  est.lambda_max = std::max(top.eigenvalue, bottom.value);
  est.lambda_min = std::min(top.eigenvalue, bottom.value);
  est.iterations_used = top.iterations + bottom.shifted.iterations;
  est.residual = std::max(top.residual, bottom.shifted.residual);
  est.converged = top.converged && bottom.shifted.converged;
  est.psd_flag = est.lambda_min >= -cfg.tol * std::abs(est.lambda_max);
  est.kappa = condition_number(est, cfg.kappa_floor).value;
  return est;
}

ConditionNumber condition_number(const SpectralEstimate& est, double floor) {
  if (!est.psd_flag) return {std::nullopt, "non-PSD Hessian; bound not applicable"};
  if (!(est.lambda_min > floor)) return {std::nullopt, "lambda_min below floor; condition number unbounded"};
  return {est.lambda_max / est.lambda_min, ""};
}

nlohmann::json to_json(const SpectralEstimate& est) {
  nlohmann::json j;
  j["lambda_max"] = est.lambda_max;
  j["lambda_min"] = est.lambda_min;
  j["kappa"] = est.kappa ? nlohmann::json(*est.kappa) : nlohmann::json(nullptr);
  j["iterations_used"] = est.iterations_used;
  j["residual"] = est.residual;
  j["psd_flag"] = est.psd_flag;
  j["converged"] = est.converged;
  return j;
}

}  // namespace uforge::spectral
