#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/data/generators.hpp"
#include "uforge/harness/compare.hpp"
#include "uforge/models/model_spec.hpp"
#include "uforge/spectral/spectral.hpp"
#include "uforge/training/optimizer.hpp"
#include "uforge/unlearning/unlearn.hpp"

namespace uforge::harness {

/// Condition-number trends of logistic regression on blobs, during training
/// from a Kaiming init and under re-initialization noise from the optimum.
struct TrendConfig {
  int seeds = 100;
  std::uint64_t base_seed = 7;
  data::BlobsConfig blobs{100, 3, 2, 4.0, 1.0, 0.0, 1000};
  double weight_decay = 1e-2;
  double train_eta = 0.5;
  int train_epochs = 60;
  int train_record_every = 5;
  int optimum_max_epochs = 20000;
  double irp_alpha = 0.9;
  int irp_steps = 40;
  int irp_record_every = 4;
  spectral::SpectralConfig spectral{1e-5, 3000, 1e-12};
};

struct TrendSummary {
  std::vector<double> mean_kappa;     // across seeds, per recorded point
  double mean_trace_spearman = 0.0;   // mean trace against record index
  int seeds_decreasing = 0;           // per-seed Spearman < 0
  int seeds_increasing = 0;           // per-seed Spearman > 0
  double sign_p_decreasing = 1.0;     // one-sided sign test for "decreasing"
  double sign_p_increasing = 1.0;     // one-sided sign test for "increasing"
};

struct TrendResult {
  TrendSummary training;
  TrendSummary irp;
  int skipped_seeds = 0;  // seeds whose condition number was undefined somewhere
};

TrendResult run_trend_study(const TrendConfig& cfg);
nlohmann::json to_json(const TrendResult& r);

/// Desk-scale unlearning comparison on blobs with an MLP.
struct DeskConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  data::BlobsConfig blobs{200, 10, 8, 3.0, 1.6, 0.0, 1000};
  double forget_fraction = 0.3;
  std::vector<int> hidden{32, 32};
  models::Activation activation = models::Activation::relu;
  double weight_decay = 0.0;
  training::OptimizerConfig train;   // original and retrain
  training::OptimizerConfig oracle;  // forget oracle, trained to fit the forget set
  std::vector<unlearning::UnlearnConfig> methods;  // seed field is overwritten per run
  std::vector<std::string> method_labels;
  int rcd_k = 30;
  training::OptimizerConfig relearn;

  /// The configuration used for the shipped comparison.
  static DeskConfig standard();
};

struct DeskResult {
  std::vector<CompareTable> tables;     // one per seed
  std::vector<std::string> labels;      // row order: retrain, then methods
  std::vector<double> mean_rcd;
  std::vector<double> mean_avg_gap;
};

DeskResult run_desk_experiment(const DeskConfig& cfg);
nlohmann::json to_json(const DeskResult& r);

}  // namespace uforge::harness
