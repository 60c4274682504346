#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/data/dataset.hpp"
#include "uforge/harness/checkpoint.hpp"
#include "uforge/models/init.hpp"
#include "uforge/models/objective.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::unlearning {

enum class Method { ft, rl, scrub, salun, ieu };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct UnlearnConfig {
  Method method = Method::ieu;
  double alpha = 1.0;  // ieu: weight kept on the current parameters
  double c = 0.0;      // ieu: forget-set ascent weight
  double eta = 0.01;
  int epochs = 10;
  std::size_t batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 0;
  int scrub_max_epochs = 2;
  double salun_fraction = 0.5;
  models::InitScope noise_scope = models::InitScope::global_d;
  /// ieu: the forget gradient is rescaled to at most clip_ratio times the
  /// retain gradient norm. 0 disables clipping.
  double clip_ratio = 10.0;
  /// ieu: permit an empty retain set (pure ascent with noise).
  bool allow_empty_retain = false;
  double divergence_factor = 1e6;
};

void validate(const UnlearnConfig& cfg);
/// Only the fields the method reads are written.
nlohmann::json to_json(const UnlearnConfig& cfg);
UnlearnConfig unlearn_config_from_json(const nlohmann::json& j);

struct UnlearnEpoch {
  int epoch = 0;
  std::optional<double> retain_loss;
  double forget_loss = 0.0;
  std::optional<double> retain_acc;
  std::optional<double> forget_acc;
  int clipped_steps = 0;
  std::optional<double> forget_kl;  // scrub only: KL(teacher || student) on the forget set

  friend bool operator==(const UnlearnEpoch&, const UnlearnEpoch&) = default;
};

struct UnlearnRun {
  std::string input_id;
  UnlearnConfig config;
  UnlearnEpoch initial;             // state before the first update
  std::vector<UnlearnEpoch> trace;  // one record per completed epoch
  ParamVector theta;
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

/// True when traces, outputs and abort state match bitwise (timing ignored).
bool same_result(const UnlearnRun& a, const UnlearnRun& b);

/// Header: epoch,retain_loss,forget_loss,retain_acc,forget_acc,clipped_steps,forget_kl
void write_csv(std::ostream& os, const UnlearnRun& run);
nlohmann::json summary_json(const UnlearnRun& run);

/// Retain objective (with the model's weight decay) and forget objective
/// (data loss only, so that ascent never acts on the regularizer).
struct Problem {
  std::optional<models::Objective> retain;
  models::Objective forget;
};

Problem make_problem(const harness::Checkpoint& ckpt, const data::SplitDataset& data);

/// theta' = alpha*theta + (1-alpha)*theta_init - eta*grad_r + c*eta*grad_f with a
/// fresh Kaiming draw theta_init. The draw is skipped entirely when alpha == 1
/// and the ascent term when c == 0. `spec` is needed only for per-layer noise.
ParamVector ieu_step(const ParamVector& theta, const ParamVector& grad_r, const ParamVector& grad_f, double alpha,
                     double c, double eta, RngStream& rng, const models::ModelSpec* spec = nullptr,
                     models::InitScope scope = models::InitScope::global_d);

struct StepInfo {
  int epoch = 0;
  long step = 0;
  const ParamVector* theta_before = nullptr;
  const ParamVector* grad_r = nullptr;   // zero vector when the retain set is empty
  const ParamVector* grad_f = nullptr;   // after clipping; null when c == 0
  const ParamVector* theta_after = nullptr;
  bool clipped = false;
};
using StepObserver = std::function<void(const StepInfo&)>;

UnlearnRun ieu_run(const Problem& problem, const ParamVector& theta0, const UnlearnConfig& cfg,
                   const StepObserver& observer = {});
UnlearnRun ieu_run(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg,
                   const StepObserver& observer = {});

UnlearnRun finetune(const Problem& problem, const ParamVector& theta0, const UnlearnConfig& cfg);
UnlearnRun finetune(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg);

/// Forget labels are redrawn every epoch from the other C-1 classes.
std::vector<std::int32_t> resample_labels(std::span<const std::int32_t> labels, int num_classes, RngStream& rng);

UnlearnRun random_label(const Problem& problem, const ParamVector& theta0, const UnlearnConfig& cfg);
UnlearnRun random_label(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg);

UnlearnRun scrub_lite(const Problem& problem, const ParamVector& theta0, const UnlearnConfig& cfg);
UnlearnRun scrub_lite(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg);

/// Coordinates kept trainable by salun: the ceil(fraction * d) largest |g|,
/// ties resolved toward the lower index.
std::vector<char> saliency_mask(const ParamVector& forget_grad, double fraction);

UnlearnRun salun_lite(const Problem& problem, const ParamVector& theta0, const UnlearnConfig& cfg);
UnlearnRun salun_lite(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg);

/// Dispatch on cfg.method.
UnlearnRun run_method(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg);

/// Iterative re-initialization: theta_{t+1} = alpha*theta_t + (1-alpha)*draw.
/// The visitor sees theta_0 .. theta_steps.
void irp_visit(const ParamVector& theta0, double alpha, long steps, RngStream& rng,
               const std::function<void(long, const ParamVector&)>& visit, const models::ModelSpec* spec = nullptr,
               models::InitScope scope = models::InitScope::global_d);
std::vector<ParamVector> irp_run(const ParamVector& theta0, double alpha, long steps, RngStream& rng);

}  // namespace uforge::unlearning
