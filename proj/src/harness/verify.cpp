#include "uforge/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uforge/data/generators.hpp"
#include "uforge/harness/oracles.hpp"
#include "uforge/metrics/eval.hpp"
#include "uforge/metrics/ieu_bound.hpp"
#include "uforge/metrics/rcd.hpp"
#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"
#include "uforge/numcore/stats.hpp"
#include "uforge/spectral/spectral.hpp"
#include "uforge/training/train.hpp"
#include "uforge/unlearning/unlearn.hpp"

namespace uforge::harness {

namespace {

constexpr std::uint64_t kOracleStream = 0x6f72636c;
constexpr std::uint64_t kSpectralStream = 0x73706563;
constexpr std::uint64_t kIrpStream = 0x69727073;
constexpr std::uint64_t kMiaStream = 0x6d696173;
constexpr std::uint64_t kMonitorStream = 0x6d6f6e69;

training::OptimizerConfig gd(double eta, int epochs) {
  training::OptimizerConfig c;
  c.kind = training::OptimizerKind::gd_fixed;
  c.eta = eta;
  c.max_epochs = epochs;
  c.grad_norm_tol = 0.0;
  return c;
}

std::vector<QuadraticOracle> oracle_family(std::uint64_t seed, int count) {
  RngStream rng = derive_stream(seed, kOracleStream);
  std::vector<QuadraticOracle> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(random_quadratic_oracle(rng, 32, 1e3));
  return out;
}

metrics::RcdReport oracle_rcd(const QuadraticOracle& o, int K) {
  const auto& q = *o.objective.spec().quadratic;
  metrics::RcdOptions opts;
  return metrics::rcd(o.theta0, o.objective, q.l_star, K, gd(1.0 / q.beta(), K), metrics::PhiKind::loss,
                      derive_stream(0, 0), opts);
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CheckResult check_quadratic_rcd_exact() {
  CheckResult r{"quadratic_rcd_exact", "RCD^200 of GD (eta = 1/lambda_1) on spectrum (4,1) from (1,1) equals 22/7",
                false, 0.0, {}};
  const auto obj = models::make_quadratic({4.0, 1.0}, ParamVector{0.0, 0.0}, 0.0);
  const auto rep = metrics::rcd(ParamVector{1.0, 1.0}, obj, 0.0, 200, gd(0.25, 200), metrics::PhiKind::loss,
                                derive_stream(0, 0));
  const double target = 22.0 / 7.0;
  const double err = std::abs(rep.rcd_value - target);
  r.margin = 1e-6 - err;
  r.passed = r.margin >= 0.0 && rep.kappa_gap_bound && std::abs(*rep.kappa_gap_bound - 10.0) < 1e-12 &&
             rep.rcd_value <= *rep.kappa_gap_bound;
  r.detail = {{"rcd", rep.rcd_value}, {"target", target}, {"abs_error", err},
              {"bound", rep.kappa_gap_bound ? nlohmann::json(*rep.kappa_gap_bound) : nlohmann::json(nullptr)}};
  return r;
}

CheckResult check_rcd_bound(std::uint64_t seed, int oracles, int K) {
  CheckResult r{"rcd_bound", "0 <= RCD^K <= kappa * (L_0 - L*) for every K on random quadratics", false, 0.0, {}};
  double upper = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (const auto& o : oracle_family(seed, oracles)) {
    const auto rep = oracle_rcd(o, K);
    if (!rep.kappa_gap_bound) throw Error("quadratic oracle produced no bound");
    double cum = 0.0;
    for (double e : rep.e) {
      cum += e;
      upper = std::min(upper, *rep.kappa_gap_bound + 1e-8 - cum);
      lower = std::min(lower, cum + 1e-10);
    }
    if (*rep.kappa_gap_bound > 0.0) worst_ratio = std::max(worst_ratio, rep.rcd_value / *rep.kappa_gap_bound);
  }
  r.margin = std::min(upper, lower);
  r.passed = r.margin >= 0.0;
  r.detail = {{"oracles", oracles}, {"K", K}, {"upper_slack", upper}, {"lower_slack", lower},
              {"max_rcd_over_bound", worst_ratio}};
  return r;
}

CheckResult check_rcd_tail(std::uint64_t seed, int oracles, int K) {
  CheckResult r{"rcd_tail_rate",
                "log(RCD^inf - RCD^K) falls with slope at least as steep as ln(1 - mu/beta) (10% tolerance)", false,
                0.0, {}};
  double margin = std::numeric_limits<double>::infinity();
  int fitted = 0;
  int vanished = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& o : oracle_family(seed, oracles)) {
    const auto& q = *o.objective.spec().quadratic;
    const double limit = metrics::quadratic_rcd_limit(o.objective, o.theta0, 1.0 / q.beta());
    const auto rep = oracle_rcd(o, K);
    std::vector<double> ks;
    std::vector<double> logs;
    double cum = 0.0;
    const double floor = 1e-9 * std::max(1.0, limit);
    for (int k = 0; k <= K; ++k) {
      cum += rep.e[static_cast<std::size_t>(k)];
      const double tail = limit - cum;
      if (!(tail > floor)) break;
      ks.push_back(k);
      logs.push_back(std::log(tail));
    }
    if (ks.size() < 3) {
      ++vanished;
      continue;
    }
    ++fitted;
    const double slope = stats::ols_slope(ks, logs);
    const double guaranteed = std::log1p(-q.mu() / q.beta());
    // Passing needs slope <= 0.9 * guaranteed (both negative).
    const double slack = -slope - 0.9 * -guaranteed;
    margin = std::min(margin, std::min(slack, -slope));
    min_ratio = std::min(min_ratio, slope / guaranteed);
  }
  r.margin = fitted > 0 ? margin : 0.0;
  r.passed = r.margin >= 0.0;
  r.detail = {{"oracles", oracles}, {"fitted", fitted}, {"tail_vanished_early", vanished},
              {"min_slope_over_guaranteed", fitted > 0 ? nlohmann::json(min_ratio) : nlohmann::json(nullptr)}};
  return r;
}

CheckResult check_decay_and_pl(std::uint64_t seed, int oracles, int steps) {
  CheckResult r{"geometric_decay_and_pl",
                "L_{t+1}-L* <= (1-mu/beta)(L_t-L*) and ||grad||^2 >= 2 mu (L_t-L*) at every GD step", false, 0.0, {}};
  double decay = std::numeric_limits<double>::infinity();
  double pl = std::numeric_limits<double>::infinity();
  long checked = 0;
  for (const auto& o : oracle_family(seed, oracles)) {
    const auto& q = *o.objective.spec().quadratic;
    const auto trace = training::train(o.objective, o.theta0, gd(1.0 / q.beta(), steps), derive_stream(0, 0));
    const double rate = 1.0 - q.mu() / q.beta();
    for (std::size_t t = 0; t < trace.records.size(); ++t) {
      const double gap = trace.records[t].loss - q.l_star;
      const double g = trace.records[t].grad_norm;
      pl = std::min(pl, g * g - 2.0 * q.mu() * gap);
      if (t + 1 < trace.records.size()) {
        decay = std::min(decay, rate * gap - (trace.records[t + 1].loss - q.l_star));
      }
      ++checked;
    }
  }
  r.margin = std::min(decay, pl) + 1e-10;
  r.passed = r.margin >= 0.0;
  r.detail = {{"steps_checked", checked}, {"decay_slack", decay}, {"pl_slack", pl}};
  return r;
}

CheckResult check_spectral_accuracy(std::uint64_t seed, int cases) {
  CheckResult r{"spectral_accuracy",
                "power iteration recovers lambda_max, lambda_min to 1e-6 relative error; kappa is their ratio", false,
                0.0, {}};
  RngStream rng = derive_stream(seed, kSpectralStream);
  spectral::SpectralConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iter = 200000;
  double worst = 0.0;
  int max_iters = 0;
  bool ratio_exact = true;
  for (int k = 0; k < cases; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform_index(63));
    const double kappa = std::exp(std::log(1e3) * rng.uniform()) + 0.01;
    const double beta = std::exp(std::log(0.1) + std::log(100.0) * rng.uniform());
    const auto spectrum = constructed_spectrum(d, beta, kappa, 1.001, rng);
    ParamVector star(d);
    normal_fill(star.span(), 1.0, rng);
    const auto obj = models::make_quadratic(spectrum, star, 0.0);
    ParamVector theta(d);
    normal_fill(theta.span(), 1.0, rng);
    const auto est = spectral::estimate_spectrum(obj, theta, cfg, rng);
    const double e_max = std::abs(est.lambda_max - spectrum.front()) / spectrum.front();
    const double e_min = std::abs(est.lambda_min - spectrum.back()) / spectrum.back();
    worst = std::max({worst, e_max, e_min});
    max_iters = std::max(max_iters, est.iterations_used);
    ratio_exact = ratio_exact && est.kappa && *est.kappa == est.lambda_max / est.lambda_min;
  }
  r.margin = 1e-6 - worst;
  r.passed = r.margin >= 0.0 && ratio_exact;
  r.detail = {{"cases", cases}, {"max_relative_error", worst}, {"max_iterations", max_iters},
              {"kappa_is_ratio", ratio_exact}};
  return r;
}

CheckResult check_irp_stationary(std::uint64_t seed, long steps, std::size_t dim) {
  CheckResult r{"irp_stationary_law",
                "re-initialization iterates settle to mean 0, variance (1-a)/(1+a) * 2/d (3 standard errors)", false,
                0.0, {}};
  double margin = std::numeric_limits<double>::infinity();
  nlohmann::json per_alpha = nlohmann::json::array();
  for (double alpha : {0.5, 0.9, 0.99}) {
    RngStream rng = derive_stream(seed, kIrpStream).child(static_cast<std::uint64_t>(alpha * 1000));
    const ParamVector start = kaiming_sample(dim, rng);
    const long burn = steps / 2;
    std::vector<double> sum(dim, 0.0);
    std::vector<double> sumsq(dim, 0.0);
    long n = 0;
    unlearning::irp_visit(start, alpha, steps, rng, [&](long t, const ParamVector& theta) {
      if (t <= burn) return;
      for (std::size_t j = 0; j < dim; ++j) {
        sum[j] += theta[j];
        sumsq[j] += theta[j] * theta[j];
      }
      ++n;
    });
    std::vector<double> means(dim);
    std::vector<double> vars(dim);
    const double nn = static_cast<double>(n);
    for (std::size_t j = 0; j < dim; ++j) {
      means[j] = sum[j] / nn;
      vars[j] = (sumsq[j] - nn * means[j] * means[j]) / (nn - 1.0);
    }
    const double target = (1.0 - alpha) / (1.0 + alpha) * (2.0 / static_cast<double>(dim));
    const double root_d = std::sqrt(static_cast<double>(dim));
    const double var_mean = stats::mean(vars);
    const double var_se = std::sqrt(stats::variance(vars)) / root_d;
    const double mean_mean = stats::mean(means);
    const double mean_se = std::sqrt(stats::variance(means)) / root_d;
    const double var_slack = 3.0 * var_se - std::abs(var_mean - target);
    const double mean_slack = 3.0 * mean_se - std::abs(mean_mean);
    margin = std::min({margin, var_slack / target, mean_slack / std::sqrt(target)});
    per_alpha.push_back({{"alpha", alpha}, {"target_variance", target}, {"tail_variance", var_mean},
                         {"variance_se", var_se}, {"tail_mean", mean_mean}, {"mean_se", mean_se}});
  }
  r.margin = margin;
  r.passed = margin >= 0.0;
  r.detail = {{"steps", steps}, {"dim", dim}, {"runs", per_alpha}};
  return r;
}

CheckResult check_alg1_limits(std::uint64_t seed) {
  CheckResult r{"alg1_limits", "ieu(alpha=1, c=0) reproduces finetune and salun(rho=1) reproduces random_label bitwise",
                false, 0.0, {}};
  data::BlobsConfig bc;
  bc.n_per_class = 30;
  bc.num_classes = 3;
  bc.dim = 2;
  const auto base = data::gen_blobs(bc, seed);
  const auto split = data::split_random(base, 0.3, seed + 1);
  const auto spec = models::make_mlp_spec(2, {8}, 3, models::Activation::tanh, 1e-4);
  training::OptimizerConfig oc;
  oc.kind = training::OptimizerKind::sgd;
  oc.eta = 0.1;
  oc.batch_size = 16;
  oc.max_epochs = 20;
  const auto original = training::train_original(split, spec, oc, seed).checkpoint;
  bool ok = true;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t batch : {std::size_t{0}, std::size_t{16}}) {
    unlearning::UnlearnConfig u;
    u.eta = 0.05;
    u.epochs = 5;
    u.batch_size = batch;
    u.seed = seed + 2;
    u.method = unlearning::Method::ieu;
    u.alpha = 1.0;
    u.c = 0.0;
    const auto ieu = unlearning::ieu_run(original, split, u);
    u.method = unlearning::Method::ft;
    const auto ft = unlearning::finetune(original, split, u);
    u.method = unlearning::Method::salun;
    u.salun_fraction = 1.0;
    const auto salun = unlearning::salun_lite(original, split, u);
    u.method = unlearning::Method::rl;
    const auto rl = unlearning::random_label(original, split, u);
    const bool a = unlearning::same_result(ieu, ft);
    const bool b = unlearning::same_result(salun, rl);
    const bool moved = !(ft.theta == original.theta) && !(rl.theta == original.theta);
    ok = ok && a && b && moved;
    runs.push_back({{"batch_size", batch}, {"ieu_equals_ft", a}, {"salun_equals_rl", b}, {"parameters_moved", moved}});
  }
  r.passed = ok;
  r.margin = ok ? 0.0 : -1.0;
  r.detail = {{"runs", runs}};
  return r;
}

BruteMia mia_bruteforce(const std::vector<double>& members, const std::vector<double>& nonmembers,
                        const std::vector<double>& probe) {
  std::vector<double> pooled = members;
  pooled.insert(pooled.end(), nonmembers.begin(), nonmembers.end());
  std::sort(pooled.begin(), pooled.end());
  BruteMia best;
  std::uint64_t best_score = 0;
  bool have = false;
  for (std::size_t k = 0; k + 1 < pooled.size(); ++k) {
    const double tau = 0.5 * pooled[k] + 0.5 * pooled[k + 1];
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    for (double l : members) tp += l <= tau ? 1 : 0;
    for (double l : nonmembers) tn += l <= tau ? 0 : 1;
    const std::uint64_t score = tp * nonmembers.size() + tn * members.size();
    if (!have || score > best_score || (score == best_score && tau < best.threshold)) {
      have = true;
      best_score = score;
      best.threshold = tau;
    }
  }
  std::size_t called = 0;
  for (double l : probe) called += l <= best.threshold ? 1 : 0;
  best.member_rate = static_cast<double>(called) / static_cast<double>(probe.size());
  return best;
}

CheckResult check_mia_bruteforce(std::uint64_t seed, int cases) {
  CheckResult r{"mia_threshold_optimality", "threshold attack equals the exhaustive midpoint sweep exactly", false, 0.0,
                {}};
  RngStream rng = derive_stream(seed, kMiaStream);
  int mismatches = 0;
  for (int k = 0; k < cases; ++k) {
    const std::size_t total = 3 + static_cast<std::size_t>(rng.uniform_index(198));
    const std::size_t n_m = 1 + static_cast<std::size_t>(rng.uniform_index(total - 2));
    const std::size_t n_n = total - n_m - 1 > 0 ? 1 + static_cast<std::size_t>(rng.uniform_index(total - n_m - 1)) : 1;
    const std::size_t n_p = std::max<std::size_t>(1, total - n_m - n_n);
    // Coarse rounding forces ties between and within the groups.
    const double grid = k % 2 == 0 ? 0.25 : 1e-3;
    auto draw = [&](std::size_t n, double shift) {
      std::vector<double> v(n);
      for (double& x : v) x = std::round((std::abs(rng.normal()) + shift) / grid) * grid;
      return v;
    };
    const auto mem = draw(n_m, 0.0);
    const auto non = draw(n_n, 0.3);
    const auto probe = draw(n_p, 0.15);
    const auto fast = metrics::mia_attack(mem, non, probe);
    const auto slow = mia_bruteforce(mem, non, probe);
    if (fast.threshold != slow.threshold || fast.member_rate != slow.member_rate) ++mismatches;
  }
  r.passed = mismatches == 0;
  r.margin = -static_cast<double>(mismatches);
  r.detail = {{"cases", cases}, {"mismatches", mismatches}};
  return r;
}

CheckResult check_ieu_monitor(std::uint64_t seed) {
  CheckResult r{"ieu_retain_gap_monitor",
                "retain-loss gap of the re-initializing update stays below the bound with trajectory L and D", false,
                0.0, {}};
  RngStream rng = derive_stream(seed, kMonitorStream);
  const std::size_t d = 10;
  const int T = 300;
  double margin = std::numeric_limits<double>::infinity();
  int runs = 0;
  nlohmann::json worst = nullptr;
  for (double kappa : {2.0, 10.0, 50.0}) {
    const auto retain_spec = constructed_spectrum(d, 1.0, kappa, 1.0, rng);
    for (double c : {0.0, 0.01, 0.1}) {
      // Keep the combined curvature positive so the expected update converges.
      const double forget_beta = c > 0.0 ? std::min(1.0, 0.5 / (kappa * c)) : 1.0;
      const auto forget_spec = constructed_spectrum(d, forget_beta, kappa, 1.0, rng);
      const ParamVector r_star = kaiming_sample(d, rng);
      const ParamVector f_star = kaiming_sample(d, rng);
      const auto task = data::gen_quadratic_task(retain_spec, r_star, 0.0, forget_spec, f_star, 0.0);
      ParamVector theta0(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double wr = 0.7 * retain_spec[i];
        const double wf = 0.3 * forget_spec[i];
        theta0[i] = (wr * r_star[i] + wf * f_star[i]) / (wr + wf);
      }
      for (double alpha : {1.0, 0.9999, 0.999, 0.99}) {
        unlearning::UnlearnConfig cfg;
        cfg.method = unlearning::Method::ieu;
        cfg.alpha = alpha;
        cfg.c = c;
        cfg.eta = 1.0;
        cfg.epochs = T;
        cfg.clip_ratio = 0.0;
        cfg.seed = seed + static_cast<std::uint64_t>(runs);
        const unlearning::Problem problem{task.retain, task.forget};
        std::vector<ParamVector> states{theta0};
        unlearning::ieu_run(problem, theta0, cfg,
                            [&](const unlearning::StepInfo& s) { states.push_back(*s.theta_after); });
        double lip = 0.0;
        for (const auto& th : states) {
          lip = std::max({lip, norm2(task.retain.gradient(th)), norm2(task.forget.gradient(th))});
        }
        const metrics::IeuBoundInputs in{1.0 / kappa, 1.0, alpha, c, lip, metrics::max_half_distance(states)};
        for (std::size_t t = 0; t < states.size(); ++t) {
          const double gap = task.retain.value(states[t]);
          const double slack = metrics::ieu_retain_gap_bound(in, static_cast<double>(t)) - gap;
          if (slack < margin) {
            margin = slack;
            worst = {{"kappa", kappa}, {"alpha", alpha}, {"c", c}, {"t", t}, {"gap", gap}, {"L", lip},
                     {"D", in.radius}};
          }
        }
        ++runs;
      }
    }
  }
  r.margin = margin;
  r.passed = margin >= 0.0;
  r.detail = {{"runs", runs}, {"steps", T}, {"tightest", worst}};
  return r;
}

VerifyReport verify_suite(std::uint64_t seed) {
  VerifyReport rep;
  rep.seed = seed;
  rep.checks.push_back(check_quadratic_rcd_exact());
  rep.checks.push_back(check_rcd_bound(seed));
  rep.checks.push_back(check_rcd_tail(seed));
  rep.checks.push_back(check_decay_and_pl(seed));
  rep.checks.push_back(check_spectral_accuracy(seed));
  rep.checks.push_back(check_irp_stationary(seed));
  rep.checks.push_back(check_alg1_limits(seed));
  rep.checks.push_back(check_mia_bruteforce(seed));
  rep.checks.push_back(check_ieu_monitor(seed));
  return rep;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"claim", c.claim}, {"passed", c.passed}, {"margin", c.margin},
                      {"detail", c.detail}});
  }
  return {{"seed", r.seed}, {"all_passed", r.all_passed()}, {"checks", checks}};
}

std::string format_table(const VerifyReport& r) {
  std::ostringstream os;
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  os << std::string(width - 5, ' ') << "check  result  margin\n";
  for (const auto& c : r.checks) {
    os << std::string(width - c.name.size(), ' ') << c.name << "  " << (c.passed ? "PASS  " : "FAIL  ") << "  "
       << format_double(c.margin) << '\n';
  }
  os << (r.all_passed() ? "all checks passed\n" : "verification FAILED\n");
  return os.str();
}

}  // namespace uforge::harness
