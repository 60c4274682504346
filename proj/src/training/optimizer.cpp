#include "uforge/training/optimizer.hpp"

#include <cmath>
#include <numeric>

#include "uforge/numcore/error.hpp"
#include "uforge/spectral/spectral.hpp"

namespace uforge::training {

namespace {

constexpr std::uint64_t kShuffleTag = 0x73687566;
constexpr std::uint64_t kSpectralTag = 0x73706563;

}  // namespace

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::gd_fixed: return "gd_fixed";
    case OptimizerKind::gd_adaptive: return "gd_adaptive";
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adam: return "adam";
  }
  return "unknown";
}

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "gd_fixed") return OptimizerKind::gd_fixed;
  if (s == "gd_adaptive") return OptimizerKind::gd_adaptive;
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw InvalidArgument("unknown optimizer: " + s);
}

void validate(const OptimizerConfig& cfg, std::size_t dataset_size) {
  if (cfg.kind != OptimizerKind::gd_adaptive && !(cfg.eta > 0.0 && std::isfinite(cfg.eta))) {
    throw InvalidArgument("step size must be positive");
  }
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) {
    throw InvalidArgument("adam betas must lie in (0, 1)");
  }
  if (!(cfg.adam_eps > 0.0)) throw InvalidArgument("adam eps must be positive");
  if (cfg.max_epochs < 0) throw InvalidArgument("max_epochs must be non-negative");
  if (!(cfg.grad_norm_tol >= 0.0)) throw InvalidArgument("grad_norm_tol must be non-negative");
  if (!(cfg.spectral_tol > 0.0) || cfg.spectral_max_iter < 1) throw InvalidArgument("invalid spectral settings");
  if (cfg.spectrum_every < 0) throw InvalidArgument("spectrum_every must be non-negative");
  if (!(cfg.divergence_factor > 0.0)) throw InvalidArgument("divergence factor must be positive");
  if (cfg.batch_size > dataset_size) throw InvalidArgument("batch size exceeds dataset size");
}

nlohmann::json to_json(const OptimizerConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"eta", cfg.eta},
          {"batch_size", cfg.batch_size == 0 ? nlohmann::json("full") : nlohmann::json(cfg.batch_size)},
          {"beta1", cfg.beta1},
          {"beta2", cfg.beta2},
          {"adam_eps", cfg.adam_eps},
          {"max_epochs", cfg.max_epochs},
          {"grad_norm_tol", cfg.grad_norm_tol},
          {"spectral_tol", cfg.spectral_tol},
          {"spectral_max_iter", cfg.spectral_max_iter},
          {"spectrum_every", cfg.spectrum_every},
          {"divergence_factor", cfg.divergence_factor}};
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  OptimizerConfig c;
  try {
    c.kind = optimizer_kind_from_string(j.at("kind").get<std::string>());
    c.eta = j.value("eta", c.eta);
    const auto& bs = j.value("batch_size", nlohmann::json("full"));
    c.batch_size = bs.is_string() ? 0 : bs.get<std::size_t>();
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.grad_norm_tol = j.value("grad_norm_tol", c.grad_norm_tol);
    c.spectral_tol = j.value("spectral_tol", c.spectral_tol);
    c.spectral_max_iter = j.value("spectral_max_iter", c.spectral_max_iter);
    c.spectrum_every = j.value("spectrum_every", c.spectrum_every);
    c.divergence_factor = j.value("divergence_factor", c.divergence_factor);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed optimizer config: ") + e.what());
  }
  return c;
}

std::vector<std::size_t> epoch_order(std::size_t n, const RngStream& rng, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream srng = rng.child(kShuffleTag).child(static_cast<std::uint64_t>(epoch));
  shuffle(std::span<std::size_t>(order), srng);
  return order;
}

Stepper::Stepper(const models::Objective& obj, OptimizerConfig cfg, RngStream rng)
    : obj_(obj), cfg_(cfg), rng_(rng) {
  validate(cfg_, obj_.size());
}

double Stepper::adaptive_eta(const ParamVector& theta, int epoch_index) {
  RngStream srng = rng_.child(kSpectralTag).child(static_cast<std::uint64_t>(epoch_index));
  const auto top = spectral::lambda_max(obj_, theta, cfg_.spectral_tol, cfg_.spectral_max_iter, srng,
                                        warm_.empty() ? nullptr : &warm_);
  if (!(top.eigenvalue > 0.0)) throw InvalidArgument("adaptive step size needs positive curvature");
  warm_ = top.vector;
  return 1.0 / top.eigenvalue;
}

void Stepper::apply(ParamVector& theta, const ParamVector& grad, double eta) {
  require_finite(grad, "gradient");
  if (cfg_.kind != OptimizerKind::adam) {
    axpy_inplace(-eta, grad, theta);
    return;
  }
  if (adam_m_.empty()) {
    adam_m_ = ParamVector(theta.dim());
    adam_v_ = ParamVector(theta.dim());
  }
  ++adam_t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(adam_t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    adam_m_[i] = cfg_.beta1 * adam_m_[i] + (1.0 - cfg_.beta1) * grad[i];
    adam_v_[i] = cfg_.beta2 * adam_v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    theta[i] -= eta * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + cfg_.adam_eps);
  }
}

double Stepper::epoch(ParamVector& theta, int epoch_index, const ParamVector* full_grad) {
  const bool full = cfg_.kind == OptimizerKind::gd_fixed || cfg_.kind == OptimizerKind::gd_adaptive ||
                    cfg_.batch_size == 0 || cfg_.batch_size >= obj_.size();
  if (full) {
    const double eta = cfg_.kind == OptimizerKind::gd_adaptive ? adaptive_eta(theta, epoch_index) : cfg_.eta;
    if (full_grad != nullptr) {
      apply(theta, *full_grad, eta);
    } else {
      apply(theta, obj_.gradient(theta), eta);
    }
    return eta;
  }
  const std::vector<std::size_t> order = epoch_order(obj_.size(), rng_, epoch_index);
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
    const std::size_t stop = std::min(order.size(), start + cfg_.batch_size);
    const auto batch = obj_.subset(std::span<const std::size_t>(order.data() + start, stop - start));
    apply(theta, batch.gradient(theta), cfg_.eta);
  }
  return cfg_.eta;
}

}  // namespace uforge::training
