#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uforge/data/dataset.hpp"
#include "uforge/harness/checkpoint.hpp"
#include "uforge/models/init.hpp"
#include "uforge/spectral/spectral.hpp"
#include "uforge/training/optimizer.hpp"

namespace uforge::training {

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> accuracy;
  double grad_norm = 0.0;
  /// Step size applied after this record; absent on the final record.
  std::optional<double> step_size;
  std::optional<spectral::SpectralEstimate> spectral;
};

enum class StopReason { converged, max_epochs };

std::string to_string(StopReason r);

struct TrainTrace {
  std::vector<EpochRecord> records;
  ParamVector final_theta;
  StopReason stop = StopReason::max_epochs;
};

/// Runs until the full-batch gradient norm is at most grad_norm_tol or
/// max_epochs updates have been applied. Throws DivergenceError when the loss
/// exceeds divergence_factor times the initial loss or turns non-finite.
TrainTrace train(const models::Objective& obj, const ParamVector& theta0, const OptimizerConfig& cfg,
                 RngStream rng);

/// Header: epoch,loss,acc,grad_norm,lambda_max,lambda_min
void write_csv(std::ostream& os, const TrainTrace& trace);

struct FitResult {
  harness::Checkpoint checkpoint;
  TrainTrace trace;
};

/// Fresh Kaiming init from the seed, then train. Checkpoint config records the
/// optimizer, the convergence criterion and how the run stopped.
FitResult fit_from_scratch(const models::Objective& obj, const OptimizerConfig& cfg, std::uint64_t seed,
                           harness::Role role, models::InitScope scope = models::InitScope::global_d);

/// Trains on the full train partition.
FitResult train_original(const data::SplitDataset& data, const models::ModelSpec& spec,
                         const OptimizerConfig& cfg, std::uint64_t seed,
                         models::InitScope scope = models::InitScope::global_d);

/// Exact unlearning: fresh init trained on the retain set only.
FitResult retrain_oracle(const data::SplitDataset& data, const models::ModelSpec& spec,
                         const OptimizerConfig& cfg, std::uint64_t seed,
                         models::InitScope scope = models::InitScope::global_d);

struct ForgetOracle {
  harness::Checkpoint checkpoint;
  double phi_loss = 0.0;
  std::optional<double> phi_error;  // 1 - accuracy, classification only
};

/// Fresh init trained to convergence on the forget set alone.
ForgetOracle forget_oracle(const data::SplitDataset& data, const models::ModelSpec& spec,
                           const OptimizerConfig& cfg, std::uint64_t seed,
                           models::InitScope scope = models::InitScope::global_d);

/// Same on an explicit forget objective. A quadratic is solved exactly.
ForgetOracle forget_oracle(const models::Objective& forget_obj, const OptimizerConfig& cfg, std::uint64_t seed,
                           models::InitScope scope = models::InitScope::global_d);

}  // namespace uforge::training
