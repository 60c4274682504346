#include "uforge/harness/experiments.hpp"

#include <cmath>

#include "uforge/metrics/rcd.hpp"
#include "uforge/models/init.hpp"
#include "uforge/numcore/error.hpp"
#include "uforge/numcore/rng.hpp"
#include "uforge/numcore/stats.hpp"
#include "uforge/training/train.hpp"
#include "uforge/unlearning/unlearn.hpp"

namespace uforge::harness {

namespace {

constexpr std::uint64_t kTrendInitStream = 1;
constexpr std::uint64_t kTrendIrpStream = 4;
constexpr std::uint64_t kTrendSpectrumStream = 5;
constexpr std::uint64_t kDeskRelearnStream = 6;

TrendSummary summarize(const std::vector<std::vector<double>>& traces) {
  TrendSummary s;
  if (traces.empty()) return s;
  const std::size_t len = traces.front().size();
  s.mean_kappa.assign(len, 0.0);
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < len; ++i) s.mean_kappa[i] += tr[i];
    const double rho = stats::spearman_vs_index(tr);
    if (rho < 0) ++s.seeds_decreasing;
    if (rho > 0) ++s.seeds_increasing;
  }
  for (double& v : s.mean_kappa) v /= static_cast<double>(traces.size());
  s.mean_trace_spearman = stats::spearman_vs_index(s.mean_kappa);
  const int trials = s.seeds_decreasing + s.seeds_increasing;
  s.sign_p_decreasing = stats::sign_test_p(s.seeds_decreasing, trials);
  s.sign_p_increasing = stats::sign_test_p(s.seeds_increasing, trials);
  return s;
}

nlohmann::json to_json(const TrendSummary& s) {
  return {{"mean_kappa", s.mean_kappa},
          {"mean_trace_spearman", s.mean_trace_spearman},
          {"seeds_decreasing", s.seeds_decreasing},
          {"seeds_increasing", s.seeds_increasing},
          {"sign_p_decreasing", s.sign_p_decreasing},
          {"sign_p_increasing", s.sign_p_increasing}};
}

std::optional<double> kappa_at(const models::Objective& obj, const ParamVector& theta,
                               const spectral::SpectralConfig& cfg, RngStream rng) {
  const auto est = spectral::estimate_spectrum(obj, theta, cfg, rng);
  return spectral::condition_number(est, cfg.kappa_floor).value;
}

}  // namespace

TrendResult run_trend_study(const TrendConfig& cfg) {
  if (cfg.seeds < 1 || cfg.train_record_every < 1 || cfg.irp_record_every < 1) {
    throw InvalidArgument("trend study needs positive seed count and record intervals");
  }
  if (!(cfg.weight_decay > 0)) throw InvalidArgument("logistic regression needs weight decay for a finite condition number");

  std::vector<std::vector<double>> train_traces;
  std::vector<std::vector<double>> irp_traces;
  TrendResult result;
  for (int s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = mix64(cfg.base_seed + static_cast<std::uint64_t>(s));
    const data::SplitDataset data = data::gen_blobs(cfg.blobs, seed);
    const models::ModelSpec spec = models::make_logistic_spec(cfg.blobs.dim, cfg.blobs.num_classes, cfg.weight_decay);
    const models::Objective obj = models::make_objective(spec, data.data, data.train_idx);

    RngStream init_rng = derive_stream(seed, kTrendInitStream);
    const ParamVector theta0 = models::kaiming_init(spec, models::InitScope::global_d, init_rng);

    training::OptimizerConfig oc;
    oc.kind = training::OptimizerKind::gd_fixed;
    oc.eta = cfg.train_eta;
    oc.max_epochs = cfg.train_epochs;
    const RngStream spec_rng = derive_stream(seed, kTrendSpectrumStream);
    std::vector<double> kt;
    bool defined = true;
    training::Stepper stepper(obj, oc, derive_stream(seed, 2));
    ParamVector theta = theta0;
    for (int e = 0; e <= cfg.train_epochs; ++e) {
      if (e % cfg.train_record_every == 0) {
        const auto k = kappa_at(obj, theta, cfg.spectral, spec_rng.child(static_cast<std::uint64_t>(e)));
        if (!k) defined = false;
        kt.push_back(k.value_or(0.0));
      }
      if (e < cfg.train_epochs) stepper.epoch(theta, e);
    }

    training::OptimizerConfig opt = oc;
    opt.max_epochs = cfg.optimum_max_epochs;
    opt.grad_norm_tol = 1e-8;
    const ParamVector optimum = training::train(obj, theta, opt, derive_stream(seed, 3)).final_theta;

    std::vector<double> ki;
    RngStream irng = derive_stream(seed, kTrendIrpStream);
    const RngStream irp_spec_rng = spec_rng.child(0x697270);
    unlearning::irp_visit(optimum, cfg.irp_alpha, cfg.irp_steps, irng, [&](long t, const ParamVector& theta) {
      if (t % cfg.irp_record_every != 0) return;
      const auto k = kappa_at(obj, theta, cfg.spectral, irp_spec_rng.child(static_cast<std::uint64_t>(t)));
      if (!k) defined = false;
      ki.push_back(k.value_or(0.0));
    });

    if (!defined) {
      ++result.skipped_seeds;
      continue;
    }
    train_traces.push_back(std::move(kt));
    irp_traces.push_back(std::move(ki));
  }
  result.training = summarize(train_traces);
  result.irp = summarize(irp_traces);
  return result;
}

nlohmann::json to_json(const TrendResult& r) {
  return {{"training", to_json(r.training)}, {"irp", to_json(r.irp)}, {"skipped_seeds", r.skipped_seeds}};
}

DeskConfig DeskConfig::standard() {
  DeskConfig c;
  c.train.kind = training::OptimizerKind::sgd;
  c.train.eta = 0.05;
  c.train.batch_size = 32;
  c.train.max_epochs = 60;
  c.train.grad_norm_tol = 1e-6;

  c.oracle = c.train;
  c.oracle.max_epochs = 300;

  c.relearn.kind = training::OptimizerKind::sgd;
  c.relearn.eta = 0.02;
  c.relearn.batch_size = 32;
  c.relearn.grad_norm_tol = 0.0;

  using unlearning::Method;
  auto make = [](Method m, double eta, int epochs) {
    unlearning::UnlearnConfig u;
    u.method = m;
    u.eta = eta;
    u.epochs = epochs;
    u.batch_size = 32;
    return u;
  };
  c.methods.push_back(make(Method::ft, 0.05, 5));
  c.method_labels.push_back("FT");
  c.methods.push_back(make(Method::rl, 0.05, 5));
  c.method_labels.push_back("RL");
  c.methods.push_back(make(Method::scrub, 0.05, 5));
  c.method_labels.push_back("SCRUB");
  c.methods.push_back(make(Method::salun, 0.05, 5));
  c.method_labels.push_back("SalUn");
  auto noisy = make(Method::ieu, 0.05, 5);
  noisy.alpha = 0.999;
  c.methods.push_back(noisy);
  c.method_labels.push_back("IEU-Noisy");
  auto ga = make(Method::ieu, 0.05, 5);
  ga.c = 0.1;
  c.methods.push_back(ga);
  c.method_labels.push_back("IEU-GA");
  return c;
}

DeskResult run_desk_experiment(const DeskConfig& cfg) {
  if (cfg.seeds.empty()) throw InvalidArgument("desk experiment needs at least one seed");
  if (cfg.methods.size() != cfg.method_labels.size()) throw InvalidArgument("one label per method is required");

  DeskResult out;
  out.labels.push_back("original");
  out.labels.push_back("retrain");
  for (const auto& l : cfg.method_labels) out.labels.push_back(l);
  out.mean_rcd.assign(out.labels.size(), 0.0);
  out.mean_avg_gap.assign(out.labels.size(), 0.0);

  for (std::uint64_t seed : cfg.seeds) {
    const data::SplitDataset data = data::split_random(data::gen_blobs(cfg.blobs, seed), cfg.forget_fraction, seed);
    const models::ModelSpec spec = models::make_mlp_spec(cfg.blobs.dim, cfg.hidden, cfg.blobs.num_classes,
                                                         cfg.activation, cfg.weight_decay);
    const auto original = training::train_original(data, spec, cfg.train, seed);
    const auto retrain = training::retrain_oracle(data, spec, cfg.train, seed);
    const auto oracle = training::forget_oracle(data, spec, cfg.oracle, seed);
    const double phi_ref = oracle.phi_error.value();
    const models::Objective forget_obj = models::make_objective(spec, data.data, data.forget_idx);

    const metrics::EvalReport ref = metrics::eval_report(retrain.checkpoint, data);
    std::vector<CompareRow> rows;
    auto add_row = [&](const std::string& label, const Checkpoint& ckpt, bool is_ref) {
      CompareRow row;
      row.label = label;
      row.eval = metrics::eval_report(ckpt, data, &ref);
      metrics::RcdOptions opts;
      opts.attach_bound = false;
      row.rcd = metrics::rcd(ckpt.theta, forget_obj, phi_ref, cfg.rcd_k, cfg.relearn,
                             metrics::PhiKind::one_minus_accuracy, derive_stream(seed, kDeskRelearnStream), opts)
                    .rcd_value;
      row.is_reference = is_ref;
      rows.push_back(std::move(row));
    };
    add_row("original", original.checkpoint, false);
    add_row("retrain", retrain.checkpoint, true);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      unlearning::UnlearnConfig uc = cfg.methods[m];
      uc.seed = seed;
      const unlearning::UnlearnRun run = unlearning::run_method(original.checkpoint, data, uc);
      Checkpoint ckpt = original.checkpoint;
      ckpt.role = Role::unlearned;
      ckpt.config = {{"unlearn", unlearning::to_json(uc)}, {"input_id", run.input_id}, {"aborted", run.aborted}};
      ckpt.theta = run.theta;
      add_row(cfg.method_labels[m], ckpt, false);
    }
    CompareTable table = compare(std::move(rows));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      out.mean_rcd[r] += *table.rows[r].rcd;
      out.mean_avg_gap[r] += *table.avg_gaps[r];
    }
    out.tables.push_back(std::move(table));
  }
  const double n = static_cast<double>(cfg.seeds.size());
  for (double& v : out.mean_rcd) v /= n;
  for (double& v : out.mean_avg_gap) v /= n;
  return out;
}

nlohmann::json to_json(const DeskResult& r) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : r.tables) tables.push_back(to_json(t));
  nlohmann::json means = nlohmann::json::array();
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    means.push_back({{"label", r.labels[i]}, {"mean_rcd", r.mean_rcd[i]}, {"mean_avg_gap", r.mean_avg_gap[i]}});
  }
  return {{"means", means}, {"per_seed", tables}};
}

}  // namespace uforge::harness
