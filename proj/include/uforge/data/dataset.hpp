#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace uforge::data {

enum class TaskKind { classification, regression };

/// Raw examples: row-major n x p features plus labels (classification) or
/// real targets (regression).
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  TaskKind task = TaskKind::classification;
  int num_classes = 0;
  std::vector<double> features;
  std::vector<std::int32_t> labels;
  std::vector<double> targets;

  std::span<const double> row(std::size_t i) const { return {features.data() + i * p, p}; }
  bool is_classification() const noexcept { return task == TaskKind::classification; }
};

/// Dataset plus the train/test partition and the retain/forget split of the
/// train partition. All index lists are sorted ascending.
///
/// Invariants: retain and forget are disjoint and their union is train;
/// in class-wise mode forget is exactly the train examples whose label is in
/// forgotten_classes, and test_retain/test_forget partition test likewise.
struct SplitDataset {
  std::shared_ptr<const Dataset> data;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::vector<std::size_t> retain_idx;
  std::vector<std::size_t> forget_idx;
  std::vector<int> forgotten_classes;  // empty unless class-wise
  std::vector<std::size_t> test_retain_idx;
  std::vector<std::size_t> test_forget_idx;
  nlohmann::json provenance = nlohmann::json::object();

  bool classwise() const noexcept { return !forgotten_classes.empty(); }
};

/// Throws InvalidArgument when any split invariant is violated.
void validate(const SplitDataset& ds);

}  // namespace uforge::data
