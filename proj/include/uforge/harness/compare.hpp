#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/metrics/eval.hpp"

namespace uforge::harness {

struct CompareRow {
  std::string label;
  metrics::EvalReport eval;
  std::optional<double> rcd;
  bool is_reference = false;  // the retrain row
};

struct CompareTable {
  std::vector<std::string> metric_names;
  std::vector<CompareRow> rows;
  /// Per row, absolute gap of every metric to the reference row, and their mean.
  std::vector<std::vector<double>> gaps;
  std::vector<std::optional<double>> avg_gaps;
  /// 1 for the highest RCD; rows without an RCD are unranked.
  std::vector<std::optional<int>> rcd_rank;
};

/// Rows must share metric names and dataset provenance. Gaps are reported
/// when exactly one row is marked as the reference. Throws InvalidArgument
/// on an empty list or mixed tasks.
CompareTable compare(std::vector<CompareRow> rows);

/// One line per row: label, metrics with parenthesized gaps, avg_gap, rcd, rcd_rank.
std::string to_csv(const CompareTable& t);
/// Includes plot-ready (avg_gap, rcd) pairs.
nlohmann::json to_json(const CompareTable& t);

}  // namespace uforge::harness
