// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "uforge/harness/experiments.hpp"
#include "uforge/harness/verify.hpp"
#include "uforge/numcore/format.hpp"

using namespace uforge;
using namespace uforge::harness;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

struct Outcome {
  bool passed = false;
  std::string measured;
};

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_s <= 0 || secs < limit_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::ostringstream line;
  line << (ok ? "[PASS] " : "[FAIL] ") << id << ' ' << name << ": " << o.measured;
  line << " | " << format_double(std::round(secs * 1000) / 1000) << " s";
  if (limit_s > 0) line << " (limit " << limit_s << " s" << (in_time ? "" : ", exceeded") << ')';
  std::cout << line.str() << std::endl;
}

std::string num(double v) { return format_double(v); }

Outcome from_check(const CheckResult& c, const std::string& what) {
  std::ostringstream os;
  os << what << ", margin " << num(c.margin) << ", detail " << c.detail.dump();
  return {c.passed, os.str()};
}

}  // namespace

int main() {
  const std::uint64_t seed = kDefaultVerifySeed;

  criterion(1, "quadratic RCD equals 22/7 within 1e-6", 1.0, [] {
    const CheckResult c = check_quadratic_rcd_exact();
    return from_check(c, "abs error " + num(c.detail.at("abs_error").get<double>()));
  });
  criterion(2, "0 <= RCD^K <= kappa*(L0-L*) on 50 random quadratics, K <= 500", 10.0,
            [&] { return from_check(check_rcd_bound(seed, 50, 500), "slack tolerances 1e-8 / 1e-10"); });
  criterion(3, "tail slope negative and at least 0.9 * ln(1-mu/beta)", 10.0,
            [&] { return from_check(check_rcd_tail(seed, 50, 500), "fitted log-tail slopes"); });
  criterion(4, "per-step geometric decay and gradient-domination slack >= -1e-10", 0.0,
            [&] { return from_check(check_decay_and_pl(seed, 50, 500), "worst slack + 1e-10"); });
  criterion(5, "lambda_max / lambda_min relative error <= 1e-6, kappa exact ratio", 0.0,
            [&] { return from_check(check_spectral_accuracy(seed, 24), "constructed spectra, d <= 64"); });
  criterion(6, "re-initialization stationary mean and variance within 3 SE", 30.0,
            [&] { return from_check(check_irp_stationary(seed, 100000, 100), "alpha in {0.5, 0.9, 0.99}"); });

  criterion(7, "condition-number trends (100 seeds, sign tests p < 0.05)", 300.0, [] {
    TrendConfig cfg;
    const TrendResult r = run_trend_study(cfg);
    const bool train_ok = r.training.sign_p_decreasing < 0.05 && r.training.mean_trace_spearman <= 0.0;
    const bool irp_ok = r.irp.sign_p_increasing < 0.05 && r.irp.mean_trace_spearman >= 0.0;
    std::ostringstream os;
    os << "training: mean-trace spearman " << num(r.training.mean_trace_spearman) << ", " << r.training.seeds_decreasing
       << "/" << (r.training.seeds_decreasing + r.training.seeds_increasing) << " seeds decreasing, p "
       << num(r.training.sign_p_decreasing) << "; re-init: spearman " << num(r.irp.mean_trace_spearman) << ", "
       << r.irp.seeds_increasing << "/" << (r.irp.seeds_decreasing + r.irp.seeds_increasing)
       << " seeds increasing, p " << num(r.irp.sign_p_increasing) << "; skipped " << r.skipped_seeds;
    return Outcome{train_ok && irp_ok && r.skipped_seeds < cfg.seeds, os.str()};
  });

  criterion(8, "ieu(alpha=1,c=0) == finetune and salun(rho=1) == random labels, bitwise", 0.0,
            [&] { return from_check(check_alg1_limits(seed), "trace and parameter equality"); });

  DeskResult desk;
  criterion(9, "desk scale: mean RCD retrain > RL > FT and Avg.Gap(IEU-Noisy) <= Avg.Gap(RL)", 600.0, [&] {
    desk = run_desk_experiment(DeskConfig::standard());
    auto at = [&](const std::string& label) {
      for (std::size_t i = 0; i < desk.labels.size(); ++i) {
        if (desk.labels[i] == label) return i;
      }
      throw std::runtime_error("missing row " + label);
    };
    const std::size_t rt = at("retrain"), rl = at("RL"), ft = at("FT"), noisy = at("IEU-Noisy");
    const bool order = desk.mean_rcd[rt] > desk.mean_rcd[rl] && desk.mean_rcd[rl] > desk.mean_rcd[ft];
    const bool gap = desk.mean_avg_gap[noisy] <= desk.mean_avg_gap[rl];
    std::ostringstream os;
    os << "RCD retrain " << num(desk.mean_rcd[rt]) << ", RL " << num(desk.mean_rcd[rl]) << ", FT "
       << num(desk.mean_rcd[ft]) << "; Avg.Gap IEU-Noisy " << num(desk.mean_avg_gap[noisy]) << ", RL "
       << num(desk.mean_avg_gap[rl]);
    return Outcome{order && gap, os.str()};
  });

  criterion(10, "membership attack equals exhaustive threshold sweep", 0.0,
            [&] { return from_check(check_mia_bruteforce(seed, 200), "mismatches must be zero"); });
  criterion(11, "retain-gap monitor never exceeded on quadratic retain objectives", 0.0,
            [&] { return from_check(check_ieu_monitor(seed), "bound minus observed gap"); });

  criterion(12, "verify suite and desk experiment reports byte-identical on rerun", 0.0, [&] {
    const std::string v1 = to_json(verify_suite(seed)).dump();
    const std::string v2 = to_json(verify_suite(seed)).dump();
    const std::string d1 = to_json(desk).dump();
    const std::string d2 = to_json(run_desk_experiment(DeskConfig::standard())).dump();
    const bool same = v1 == v2 && d1 == d2 && !d1.empty();
    std::ostringstream os;
    os << "verify " << (v1 == v2 ? "identical" : "differs") << " (" << v1.size() << " bytes), desk "
       << (d1 == d2 ? "identical" : "differs") << " (" << d1.size() << " bytes)";
    return Outcome{same, os.str()};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
