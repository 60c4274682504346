#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "uforge/models/objective.hpp"
#include "uforge/spectral/spectral.hpp"

using namespace uforge;
using namespace uforge::models;
using namespace uforge::spectral;

namespace {

Objective quad(std::vector<double> spectrum) {
  const std::size_t d = spectrum.size();
  return make_quadratic(std::move(spectrum), ParamVector(d), 0.0);
}

}  // namespace

TEST_CASE("lambda_max on known spectra") {
  RngStream rng = derive_stream(1, 1);
  const ParamVector at({1.0, 1.0});
  const PowerResult r = lambda_max(quad({4, 1}), at, 1e-12, 10000, rng);
  CHECK(std::abs(r.eigenvalue - 4) <= 1e-8);
  CHECK(r.converged);

  const PowerResult iso = lambda_max(quad({1, 1}), at, 1e-12, 10000, rng);
  CHECK(iso.eigenvalue == doctest::Approx(1.0));
  CHECK(iso.iterations == 1);

  const PowerResult near = lambda_max(quad({4, 3.999, 1}), ParamVector(3), 1e-12, 200000, rng);
  MESSAGE("near-degenerate pair needed " << near.iterations << " iterations");
  CHECK(std::abs(near.eigenvalue - 4) <= 1e-4);
  CHECK(near.iterations > r.iterations);
}

TEST_CASE("lambda_min through the shifted operator") {
  RngStream rng = derive_stream(2, 1);
  const Objective q = quad({4, 1});
  const LambdaMinResult m = lambda_min(q, ParamVector(2), 4.0, 1e-12, 10000, rng);
  CHECK(std::abs(m.value - 1) <= 1e-6);
  CHECK(m.psd_flag);

  const LambdaMinResult flat = lambda_min(quad({4, 4}), ParamVector(2), 4.0, 1e-12, 10000, rng);
  CHECK(flat.value == 4.0);
  CHECK(flat.shifted.residual == 0.0);
}

TEST_CASE("condition number and its diagnostics") {
  RngStream rng = derive_stream(3, 1);
  const SpectralEstimate e = estimate_spectrum(quad({4, 1}), ParamVector(2), SpectralConfig{}, rng);
  CHECK(e.kappa.value() == doctest::Approx(4.0).epsilon(1e-8));
  SpectralEstimate manual;
  manual.lambda_max = 10;
  manual.lambda_min = 0.1;
  manual.psd_flag = true;
  CHECK(condition_number(manual).value.value() == doctest::Approx(100.0));
  manual.psd_flag = false;
  const ConditionNumber bad = condition_number(manual);
  CHECK(!bad.value);
  CHECK(bad.diagnostic == "non-PSD Hessian; bound not applicable");
}

TEST_CASE("scaling the objective scales the eigenvalues") {
  RngStream a = derive_stream(4, 1), b = derive_stream(4, 1);
  const SpectralEstimate e1 = estimate_spectrum(quad({3, 2, 0.5}), ParamVector(3), SpectralConfig{}, a);
  const SpectralEstimate e2 = estimate_spectrum(quad({30, 20, 5}), ParamVector(3), SpectralConfig{}, b);
  CHECK(e2.lambda_max == doctest::Approx(10 * e1.lambda_max).epsilon(1e-9));
  CHECK(e2.lambda_min == doctest::Approx(10 * e1.lambda_min).epsilon(1e-9));
  CHECK(e2.kappa.value() == doctest::Approx(e1.kappa.value()).epsilon(1e-9));
}

TEST_CASE("reported residual matches a recomputation") {
  RngStream rng = derive_stream(5, 1);
  const Objective q = quad({5, 3, 2, 1});
  const PowerResult r = lambda_max(q, ParamVector(4), 1e-9, 10000, rng);
  ParamVector av = q.hvp(ParamVector(4), r.vector);
  axpy_inplace(-r.eigenvalue, r.vector, av);
  CHECK(norm2(av) == doctest::Approx(r.residual).epsilon(1e-6));
  CHECK(norm2(r.vector) == doctest::Approx(1.0));
}

TEST_CASE("indefinite MLP Hessian against a finite-difference Hessian") {
  // One input, one tanh unit, one output: W1, b1, W2, b2.
  auto reg = testutil::random_regression(12, 1, 21);
  const Objective obj = make_objective(make_mlp_spec(1, {1}, 1, Activation::tanh), reg, testutil::all_rows(12));
  REQUIRE(obj.dim() == 4);
  const ParamVector theta({1.3, -0.4, 2.1, 0.3});

  Eigen::Matrix4d h;
  const double eps = 1e-5;
  for (int j = 0; j < 4; ++j) {
    ParamVector a = theta, b = theta;
    a[j] += eps;
    b[j] -= eps;
    const ParamVector ga = obj.gradient(a), gb = obj.gradient(b);
    for (int i = 0; i < 4; ++i) h(i, j) = (ga[i] - gb[i]) / (2 * eps);
  }
  const Eigen::Matrix4d sym = 0.5 * (h + h.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(3);
  MESSAGE("finite-difference extremes " << lo << " " << hi);
  REQUIRE(lo < 0);

  RngStream rng = derive_stream(6, 1);
  const SpectralEstimate est = estimate_spectrum(obj, theta, SpectralConfig{1e-10, 100000, 1e-12}, rng);
  CHECK(est.lambda_max == doctest::Approx(hi).epsilon(1e-5));
  CHECK(est.lambda_min == doctest::Approx(lo).epsilon(1e-5));
  CHECK_FALSE(est.psd_flag);
  CHECK_FALSE(est.kappa.has_value());
}
