#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uforge/data/dataset.hpp"
#include "uforge/harness/checkpoint.hpp"
#include "uforge/models/objective.hpp"

namespace uforge::metrics {

struct MiaResult {
  double threshold = 0.0;
  double balanced_accuracy = 0.0;
  double member_rate = 0.0;
};

/// Loss-threshold membership attack. An example is called a member when its
/// loss is <= tau. Candidates are the midpoints of consecutive sorted pooled
/// member/non-member losses; tau maximizes balanced accuracy, ties going to
/// the smallest tau. member_rate is the fraction of `probe` called members.
MiaResult mia_attack(std::span<const double> member_losses, std::span<const double> nonmember_losses,
                     std::span<const double> probe_losses);

/// Attack with retain as members, test as non-members, forget as the probe.
double mia_score(const ParamVector& theta, const models::Objective& retain, const models::Objective& test,
                 const models::Objective& forget);

struct EvalReport {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<double> gaps;  // parallel to metrics when a reference was given
  std::optional<double> avg_gap;

  std::optional<double> get(const std::string& name) const;
};

/// Arithmetic mean of absolute gaps.
double avg_gap(std::span<const double> gaps);

/// Accuracies on retain-train, forget-train, test (plus test halves for
/// class-wise splits) and the MIA member rate of the forget set. With a
/// reference, absolute per-metric gaps and their mean.
EvalReport eval_report(const harness::Checkpoint& ckpt, const data::SplitDataset& data,
                       const EvalReport* reference = nullptr);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);

}  // namespace uforge::metrics
