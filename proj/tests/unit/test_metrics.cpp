#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "uforge/data/generators.hpp"
#include "uforge/harness/verify.hpp"
#include "uforge/metrics/eval.hpp"
#include "uforge/metrics/ieu_bound.hpp"
#include "uforge/metrics/rcd.hpp"
#include "uforge/numcore/error.hpp"
#include "uforge/training/train.hpp"

using namespace uforge;
using namespace uforge::metrics;

namespace {

models::Objective quad41() { return models::make_quadratic({4.0, 1.0}, ParamVector({0.0, 0.0}), 0.0); }

training::OptimizerConfig gd(double eta) {
  training::OptimizerConfig c;
  c.kind = training::OptimizerKind::gd_fixed;
  c.eta = eta;
  c.grad_norm_tol = 0.0;
  return c;
}

RcdReport quad_rcd(const ParamVector& theta0, int K) {
  return rcd(theta0, quad41(), 0.0, K, gd(0.25), PhiKind::loss, derive_stream(1, 1));
}

}  // namespace

TEST_CASE("rcd on the (4,1) quadratic") {
  const RcdReport r = quad_rcd(ParamVector({1.0, 1.0}), 200);
  CHECK(std::abs(r.rcd_value - 22.0 / 7.0) <= 1e-6);
  CHECK(r.e.size() == 201);
  CHECK(r.e[0] == 2.5);
  CHECK(r.kappa_gap_bound.value() == doctest::Approx(10.0));
  CHECK(r.rcd_value <= *r.kappa_gap_bound);
  CHECK(r.bound_note == "exact");
  CHECK(r.label == "RCD");
  CHECK(quadratic_rcd_limit(quad41(), ParamVector({1.0, 1.0}), 0.25) == doctest::Approx(22.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("rcd tail after ten epochs") {
  const RcdReport r = quad_rcd(ParamVector({1.0, 1.0}), 10);
  const double tail = 22.0 / 7.0 - r.rcd_value;
  // Remaining terms 0.5 * 0.5625^t for t >= 11.
  const double expected = 0.5 * std::pow(0.5625, 11) / 0.4375;
  CHECK(tail == doctest::Approx(expected).epsilon(1e-10));
  CHECK(tail == doctest::Approx(2.0386e-3).epsilon(1e-4));
  CHECK(r.tail_estimate.value() == doctest::Approx(expected).epsilon(1e-8));
  CHECK(r.tail_bound.value() >= tail);
}

TEST_CASE("rcd at the forget optimum is zero") {
  const RcdReport r = quad_rcd(ParamVector({0.0, 0.0}), 50);
  CHECK(r.rcd_value == 0.0);
  for (double e : r.e) CHECK(e == 0.0);
}

TEST_CASE("isotropic quadratic attains its bound") {
  const auto q = models::make_quadratic({2.0, 2.0}, ParamVector({0.0, 0.0}), 0.0);
  const RcdReport r = rcd(ParamVector({1.0, -1.0}), q, 0.0, 20, gd(0.5), PhiKind::loss, derive_stream(2, 2));
  CHECK(r.rcd_value == 2.0);
  CHECK(*r.kappa_gap_bound == doctest::Approx(2.0));
}

TEST_CASE("rcd tail bound formula") {
  CHECK(rcd_tail_bound(4.0, 2.5, 10) == doctest::Approx(2.5 * 4.0 * std::pow(0.75, 11)));
  CHECK(rcd_tail_bound(1.0, 3.0, 0) == 0.0);
}

TEST_CASE("rcd with adam is labelled") {
  training::OptimizerConfig a = gd(0.05);
  a.kind = training::OptimizerKind::adam;
  const RcdReport r = rcd(ParamVector({1.0, 1.0}), quad41(), 0.0, 5, a, PhiKind::loss, derive_stream(3, 3));
  CHECK(r.label == "RCD_Adam");
}

TEST_CASE("rcd rejects non-finite terms") {
  CHECK_THROWS_AS(rcd(ParamVector({1.0, 1.0}), quad41(), 0.0, 2000, gd(0.6), PhiKind::loss, derive_stream(1, 1)),
                  Error);
}

TEST_CASE("membership attack examples") {
  const std::vector<double> same{0.1, 0.2, 0.3, 0.4};
  const MiaResult m = mia_attack(same, same, same);
  CHECK(m.balanced_accuracy == doctest::Approx(0.5));

  const std::vector<double> members{0.01, 0.02, 0.03};
  const std::vector<double> non{1.0, 1.1, 1.2};
  const std::vector<double> probe{5.0, 6.0};
  const MiaResult sep = mia_attack(members, non, probe);
  CHECK(sep.balanced_accuracy == 1.0);
  CHECK(sep.member_rate == 0.0);
  CHECK(sep.threshold == doctest::Approx(0.515));
}

TEST_CASE("membership attack equals a brute-force sweep") {
  RngStream rng = derive_stream(4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b, p;
    for (int i = 0; i < 20; ++i) a.push_back(std::round(rng.uniform() * 20) / 10);
    for (int i = 0; i < 20; ++i) b.push_back(std::round((rng.uniform() + 0.3) * 20) / 10);
    for (int i = 0; i < 20; ++i) p.push_back(std::round(rng.uniform() * 30) / 10);
    const MiaResult fast = mia_attack(a, b, p);
    const harness::BruteMia slow = harness::mia_bruteforce(a, b, p);
    CHECK(fast.threshold == slow.threshold);
    CHECK(fast.member_rate == slow.member_rate);
  }
}

TEST_CASE("average gap") {
  const std::vector<double> g{0.02, 0.04, 0.00, 0.06};
  CHECK(avg_gap(g) == doctest::Approx(0.03));
}

TEST_CASE("evaluation reports") {
  data::BlobsConfig bc;
  bc.n_per_class = 30;
  bc.num_classes = 4;
  const auto rnd = data::split_random(data::gen_blobs(bc, 2), 0.3, 2);
  const auto cls = data::split_classwise(data::gen_blobs(bc, 2), 0.25, 2);
  training::OptimizerConfig oc;
  oc.kind = training::OptimizerKind::gd_fixed;
  oc.eta = 0.5;
  oc.max_epochs = 50;
  const auto spec = models::make_logistic_spec(2, 4, 1e-3);
  const auto ck = training::train_original(rnd, spec, oc, 2).checkpoint;

  const EvalReport a = eval_report(ck, rnd);
  CHECK(a.metrics.size() == 4);
  const EvalReport self = eval_report(ck, rnd, &a);
  CHECK(self.avg_gap.value() == 0.0);
  const EvalReport back = eval_report_from_json(to_json(self));
  CHECK(back.metrics == self.metrics);
  CHECK(back.avg_gap == self.avg_gap);

  const EvalReport c = eval_report(ck, cls);
  CHECK(c.metrics.size() == 6);
  CHECK(c.get("test_forget_acc").has_value());
  CHECK_THROWS_AS(eval_report(ck, cls, &a), InvalidArgument);
}

TEST_CASE("retain-gap bound arithmetic") {
  IeuBoundInputs in{0.5, 2.0, 0.9, 0.1, 3.0, 1.5};
  const double t = 4.0;
  const double inner = 1.5 * 0.1 / 2 + 3.0 * 0.1 / 4.0 + 3.0 / 2.0;
  const double expected = 3.0 * 1.5 * std::exp(-0.25 * t) + 4.0 * inner * inner + 2.0 * 0.01;
  CHECK(ieu_retain_gap_bound(in, t) == doctest::Approx(expected).epsilon(1e-14));
  in.mu = 0.0;
  CHECK_THROWS_AS(ieu_retain_gap_bound(in, t), InvalidArgument);

  const std::vector<ParamVector> states{ParamVector({0.0, 0.0}), ParamVector({3.0, 4.0}), ParamVector({1.0, 1.0})};
  CHECK(max_half_distance(states) == 2.5);
}
