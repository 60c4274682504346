#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "uforge/data/generators.hpp"
#include "uforge/models/objective.hpp"
#include "uforge/numcore/error.hpp"
#include "uforge/training/train.hpp"

using namespace uforge;
using namespace uforge::training;

namespace {

models::Objective quad41() { return models::make_quadratic({4.0, 1.0}, ParamVector({0.0, 0.0}), 0.0); }

OptimizerConfig gd(double eta, int epochs) {
  OptimizerConfig c;
  c.kind = OptimizerKind::gd_fixed;
  c.eta = eta;
  c.max_epochs = epochs;
  return c;
}

}  // namespace

TEST_CASE("fixed-step gradient descent loss sequence") {
  const TrainTrace t = train(quad41(), ParamVector({1.0, 1.0}), gd(0.25, 2), derive_stream(1, 1));
  REQUIRE(t.records.size() == 3);
  CHECK(t.records[0].loss == 2.5);
  CHECK(t.records[1].loss == 0.28125);
  CHECK(t.records[2].loss == 0.158203125);
  CHECK(t.stop == StopReason::max_epochs);
}

TEST_CASE("starting at the optimum stops immediately") {
  const TrainTrace t = train(quad41(), ParamVector({0.0, 0.0}), gd(0.25, 50), derive_stream(1, 1));
  CHECK(t.records.size() == 1);
  CHECK(t.records[0].epoch == 0);
  CHECK(t.stop == StopReason::converged);
}

TEST_CASE("adaptive step on an isotropic quadratic converges in one step") {
  OptimizerConfig c;
  c.kind = OptimizerKind::gd_adaptive;
  c.max_epochs = 10;
  const auto q = models::make_quadratic({1.0, 1.0}, ParamVector({0.5, -2.0}), 0.0);
  const TrainTrace t = train(q, ParamVector({3.0, 1.0}), c, derive_stream(2, 1));
  CHECK(t.records[0].step_size.value() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t.stop == StopReason::converged);
  CHECK(t.records.size() == 2);
  CHECK(distance(t.final_theta, ParamVector({0.5, -2.0})) < 1e-9);
}

TEST_CASE("adaptive step tracks 1/lambda_max") {
  OptimizerConfig c;
  c.kind = OptimizerKind::gd_adaptive;
  c.max_epochs = 5;
  const auto q = models::make_quadratic({5.0, 2.0, 1.0}, ParamVector(3), 0.0);
  const TrainTrace t = train(q, ParamVector({1.0, 1.0, 1.0}), c, derive_stream(3, 1));
  for (const auto& r : t.records) {
    if (r.step_size) CHECK(*r.step_size == doctest::Approx(0.2).epsilon(1e-8));
  }
}

TEST_CASE("divergence is detected") {
  CHECK_THROWS_AS(train(quad41(), ParamVector({1.0, 1.0}), gd(1.0, 200), derive_stream(1, 1)), DivergenceError);
}

TEST_CASE("epoch order is a seeded permutation") {
  const RngStream s = derive_stream(9, 2);
  const auto a = epoch_order(50, s, 0);
  CHECK(a == epoch_order(50, s, 0));
  CHECK(a != epoch_order(50, s, 1));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == testutil::all_rows(50));
}

TEST_CASE("oracles on a blobs task") {
  data::BlobsConfig bc;
  bc.n_per_class = 30;
  bc.num_classes = 2;
  bc.separation = 8.0;
  bc.noise_sd = 0.5;
  const data::SplitDataset full = data::gen_blobs(bc, 4);
  const auto spec = models::make_logistic_spec(2, 2, 0.01);
  OptimizerConfig c = gd(1.0, 20000);

  SUBCASE("empty forget set: retrain equals train") {
    const data::SplitDataset& ds = full;
    const FitResult a = train_original(ds, spec, c, 7);
    const FitResult b = retrain_oracle(ds, spec, c, 7);
    CHECK(a.checkpoint.theta == b.checkpoint.theta);
    CHECK(a.trace.records.size() == b.trace.records.size());
    CHECK_THROWS_AS(forget_oracle(ds, spec, c, 7), InvalidArgument);
  }
  SUBCASE("different seeds converge to the tolerance") {
    const data::SplitDataset ds = data::split_random(full, 0.3, 4);
    const FitResult a = retrain_oracle(ds, spec, c, 1);
    const FitResult b = retrain_oracle(ds, spec, c, 2);
    CHECK(a.trace.stop == StopReason::converged);
    CHECK(b.trace.stop == StopReason::converged);
    CHECK(a.trace.records.back().grad_norm <= c.grad_norm_tol);
    CHECK(b.trace.records.back().grad_norm <= c.grad_norm_tol);
    CHECK(a.checkpoint.theta != b.checkpoint.theta);
    CHECK(a.checkpoint.config.at("stop_reason") == "converged");
  }
  SUBCASE("separable forget set has zero error reference") {
    const data::SplitDataset ds = data::split_random(full, 0.3, 4);
    const ForgetOracle fo = forget_oracle(ds, models::make_logistic_spec(2, 2, 0.0), gd(1.0, 2000), 3);
    CHECK(fo.phi_error.value() == 0.0);
    CHECK(fo.checkpoint.role == harness::Role::forget_oracle);
  }
}

TEST_CASE("quadratic forget oracle is exact") {
  const auto q = models::make_quadratic({3.0, 1.0}, ParamVector({0.2, 0.4}), 1.25);
  const ForgetOracle fo = forget_oracle(q, gd(0.1, 10), 1);
  CHECK(fo.phi_loss == 1.25);
  CHECK(fo.checkpoint.theta == ParamVector({0.2, 0.4}));
}
