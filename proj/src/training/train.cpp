#include "uforge/training/train.hpp"

#include <algorithm>
#include <cmath>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"

namespace uforge::training {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kSpectrumTag = 0x7370726d;

nlohmann::json fit_config(const OptimizerConfig& cfg, models::InitScope scope, const TrainTrace& trace) {
  const EpochRecord& last = trace.records.back();
  return {{"optimizer", to_json(cfg)},
          {"init_scope", models::to_string(scope)},
          {"convergence", {{"grad_norm_tol", cfg.grad_norm_tol}, {"max_epochs", cfg.max_epochs}}},
          {"stop_reason", to_string(trace.stop)},
          {"epochs_run", last.epoch},
          {"final_loss", last.loss},
          {"final_grad_norm", last.grad_norm}};
}

}  // namespace

std::string to_string(StopReason r) { return r == StopReason::converged ? "converged" : "max_epochs"; }

TrainTrace train(const models::Objective& obj, const ParamVector& theta0, const OptimizerConfig& cfg,
                 RngStream rng) {
  validate(cfg, obj.size());
  require_same_dim(theta0, ParamVector(obj.dim()), "train");
  require_finite(theta0, "initial parameters");
  Stepper stepper(obj, cfg, rng);
  TrainTrace trace;
  ParamVector theta = theta0;
  double loss0 = 0.0;
  for (int epoch = 0;; ++epoch) {
    auto [loss, grad] = obj.value_and_gradient(theta);
    if (epoch == 0) loss0 = loss;
    if (!std::isfinite(loss) || loss > cfg.divergence_factor * std::max(std::abs(loss0), 1e-12)) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + " (loss " +
                            format_double(loss) + ")");
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    rec.grad_norm = norm2(grad);
    if (obj.is_classification()) rec.accuracy = obj.accuracy(theta);
    if (cfg.spectrum_every > 0 && epoch % cfg.spectrum_every == 0) {
      RngStream srng = rng.child(kSpectrumTag).child(static_cast<std::uint64_t>(epoch));
      rec.spectral = spectral::estimate_spectrum(
          obj, theta, spectral::SpectralConfig{cfg.spectral_tol, cfg.spectral_max_iter, 1e-12}, srng);
    }
    const bool converged = rec.grad_norm <= cfg.grad_norm_tol;
    if (converged || epoch == cfg.max_epochs) {
      trace.stop = converged ? StopReason::converged : StopReason::max_epochs;
      trace.records.push_back(std::move(rec));
      break;
    }
    rec.step_size = stepper.epoch(theta, epoch, &grad);
    trace.records.push_back(std::move(rec));
  }
  require_finite(theta, "trained parameters");
  trace.final_theta = std::move(theta);
  return trace;
}

void write_csv(std::ostream& os, const TrainTrace& trace) {
  os << "epoch,loss,acc,grad_norm,lambda_max,lambda_min\n";
  for (const auto& r : trace.records) {
    os << r.epoch << ',' << format_double(r.loss) << ',' << (r.accuracy ? format_double(*r.accuracy) : "") << ','
       << format_double(r.grad_norm) << ',' << (r.spectral ? format_double(r.spectral->lambda_max) : "") << ','
       << (r.spectral ? format_double(r.spectral->lambda_min) : "") << '\n';
  }
}

FitResult fit_from_scratch(const models::Objective& obj, const OptimizerConfig& cfg, std::uint64_t seed,
                           harness::Role role, models::InitScope scope) {
  RngStream init_rng = derive_stream(seed, kInitStream);
  const ParamVector theta0 = models::kaiming_init(obj.spec(), scope, init_rng);
  FitResult out;
  out.trace = train(obj, theta0, cfg, derive_stream(seed, kTrainStream));
  out.checkpoint.role = role;
  out.checkpoint.spec = obj.spec();
  out.checkpoint.config = fit_config(cfg, scope, out.trace);
  out.checkpoint.root_seed = seed;
  out.checkpoint.theta = out.trace.final_theta;
  return out;
}

FitResult train_original(const data::SplitDataset& data, const models::ModelSpec& spec,
                         const OptimizerConfig& cfg, std::uint64_t seed, models::InitScope scope) {
  if (data.train_idx.empty()) throw InvalidArgument("empty train set");
  return fit_from_scratch(models::make_objective(spec, data.data, data.train_idx), cfg, seed,
                          harness::Role::original, scope);
}

FitResult retrain_oracle(const data::SplitDataset& data, const models::ModelSpec& spec,
                         const OptimizerConfig& cfg, std::uint64_t seed, models::InitScope scope) {
  if (data.retain_idx.empty()) throw InvalidArgument("empty retain set");
  return fit_from_scratch(models::make_objective(spec, data.data, data.retain_idx), cfg, seed,
                          harness::Role::retrain, scope);
}

ForgetOracle forget_oracle(const data::SplitDataset& data, const models::ModelSpec& spec,
                           const OptimizerConfig& cfg, std::uint64_t seed, models::InitScope scope) {
  if (data.forget_idx.empty()) throw InvalidArgument("empty forget set");
  return forget_oracle(models::make_objective(spec, data.data, data.forget_idx), cfg, seed, scope);
}

ForgetOracle forget_oracle(const models::Objective& forget_obj, const OptimizerConfig& cfg, std::uint64_t seed,
                           models::InitScope scope) {
  ForgetOracle out;
  if (forget_obj.is_quadratic()) {
    const auto& q = *forget_obj.spec().quadratic;
    out.checkpoint.role = harness::Role::forget_oracle;
    out.checkpoint.spec = forget_obj.spec();
    out.checkpoint.config = {{"solver", "closed_form"}};
    out.checkpoint.root_seed = seed;
    out.checkpoint.theta = q.theta_star;
    out.phi_loss = q.l_star;
    return out;
  }
  if (forget_obj.size() == 0) throw InvalidArgument("empty forget set");
  FitResult fit = fit_from_scratch(forget_obj, cfg, seed, harness::Role::forget_oracle, scope);
  out.phi_loss = forget_obj.value(fit.checkpoint.theta);
  if (forget_obj.is_classification()) out.phi_error = 1.0 - forget_obj.accuracy(fit.checkpoint.theta);
  out.checkpoint = std::move(fit.checkpoint);
  return out;
}

}  // namespace uforge::training
