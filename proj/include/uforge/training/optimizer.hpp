#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/models/objective.hpp"
#include "uforge/numcore/param_vector.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::training {

enum class OptimizerKind { gd_fixed, gd_adaptive, sgd, adam };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_kind_from_string(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::gd_fixed;
  double eta = 0.1;  // unused by gd_adaptive
  /// 0 means full batch. gd_fixed and gd_adaptive are always full batch.
  std::size_t batch_size = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 100;
  double grad_norm_tol = 1e-8;
  double spectral_tol = 1e-10;
  int spectral_max_iter = 20000;
  /// Record a spectral estimate every this many epochs; 0 disables.
  int spectrum_every = 0;
  double divergence_factor = 1e6;
};

/// Throws InvalidArgument on out-of-range fields or a batch larger than the data.
void validate(const OptimizerConfig& cfg, std::size_t dataset_size);

nlohmann::json to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

/// Seeded permutation of 0..n-1 used as the example order of one minibatch
/// epoch. Depends only on (rng identity, epoch), not on rng position.
std::vector<std::size_t> epoch_order(std::size_t n, const RngStream& rng, int epoch);

/// Applies whole epochs of an optimizer to theta. Holds the Adam moments and
/// the warm-start vector of the adaptive step-size power iteration, so one
/// stepper must drive one trajectory.
class Stepper {
 public:
  Stepper(const models::Objective& obj, OptimizerConfig cfg, RngStream rng);

  /// One epoch starting at theta. `full_grad` may carry the full-batch
  /// gradient at theta when the caller already has it. Returns the step size
  /// of the epoch's first update.
  double epoch(ParamVector& theta, int epoch_index, const ParamVector* full_grad = nullptr);

  const OptimizerConfig& config() const noexcept { return cfg_; }

 private:
  void apply(ParamVector& theta, const ParamVector& grad, double eta);
  double adaptive_eta(const ParamVector& theta, int epoch_index);

  const models::Objective& obj_;
  OptimizerConfig cfg_;
  RngStream rng_;
  ParamVector adam_m_;
  ParamVector adam_v_;
  long adam_t_ = 0;
  ParamVector warm_;
};

}  // namespace uforge::training
