#include "uforge/metrics/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "uforge/numcore/error.hpp"

namespace uforge::metrics {

namespace {

std::size_t count_at_most(const std::vector<double>& sorted, double tau) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), tau) - sorted.begin());
}

void require_finite_losses(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw NonFiniteError(std::string("non-finite ") + what + " loss");
  }
}

}  // namespace

MiaResult mia_attack(std::span<const double> member_losses, std::span<const double> nonmember_losses,
                     std::span<const double> probe_losses) {
  if (member_losses.empty() || nonmember_losses.empty() || probe_losses.empty()) {
    throw InvalidArgument("membership attack needs non-empty member, non-member and probe sets");
  }
  require_finite_losses(member_losses, "member");
  require_finite_losses(nonmember_losses, "non-member");
  require_finite_losses(probe_losses, "probe");
  std::vector<double> members(member_losses.begin(), member_losses.end());
  std::vector<double> nonmembers(nonmember_losses.begin(), nonmember_losses.end());
  std::sort(members.begin(), members.end());
  std::sort(nonmembers.begin(), nonmembers.end());
  std::vector<double> pooled;
  pooled.reserve(members.size() + nonmembers.size());
  std::merge(members.begin(), members.end(), nonmembers.begin(), nonmembers.end(), std::back_inserter(pooled));

  const auto n_m = static_cast<std::uint64_t>(members.size());
  const auto n_n = static_cast<std::uint64_t>(nonmembers.size());
  if (members.size() > (1u << 30) || nonmembers.size() > (1u << 30)) throw InvalidArgument("membership sets too large");
  bool have = false;
  std::uint64_t best_score = 0;
  double best_tau = 0.0;
  for (std::size_t k = 0; k + 1 < pooled.size(); ++k) {
    const double tau = 0.5 * pooled[k] + 0.5 * pooled[k + 1];
    const auto tp = static_cast<std::uint64_t>(count_at_most(members, tau));
    const auto tn = n_n - static_cast<std::uint64_t>(count_at_most(nonmembers, tau));
    // Balanced accuracy scaled by 2 * n_m * n_n, compared exactly.
    const std::uint64_t score = tp * n_n + tn * n_m;
    if (!have || score > best_score || (score == best_score && tau < best_tau)) {
      have = true;
      best_score = score;
      best_tau = tau;
    }
  }
  MiaResult out;
  out.threshold = best_tau;
  out.balanced_accuracy =
      static_cast<double>(best_score) / (2.0 * static_cast<double>(n_m) * static_cast<double>(n_n));
  const auto members_called = std::count_if(probe_losses.begin(), probe_losses.end(),
                                            [&](double l) { return l <= best_tau; });
  out.member_rate = static_cast<double>(members_called) / static_cast<double>(probe_losses.size());
  return out;
}

double mia_score(const ParamVector& theta, const models::Objective& retain, const models::Objective& test,
                 const models::Objective& forget) {
  if (!retain.is_classification()) throw InvalidArgument("membership attack needs a classification task");
  const auto lr = retain.per_example_loss(theta);
  const auto lt = test.per_example_loss(theta);
  const auto lf = forget.per_example_loss(theta);
  return mia_attack(lr, lt, lf).member_rate;
}

std::optional<double> EvalReport::get(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

double avg_gap(std::span<const double> gaps) {
  if (gaps.empty()) throw InvalidArgument("average gap of an empty list");
  double s = 0.0;
  for (double g : gaps) s += std::abs(g);
  return s / static_cast<double>(gaps.size());
}

EvalReport eval_report(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const EvalReport* reference) {
  data::validate(data);
  if (!data.data->is_classification()) throw InvalidArgument("evaluation report needs a classification task");
  if (ckpt.spec.kind == models::ModelKind::quadratic || ckpt.spec.input_dim != static_cast<int>(data.data->p) ||
      ckpt.spec.num_classes != data.data->num_classes) {
    throw DimensionError("checkpoint model does not match the dataset");
  }
  if (data.retain_idx.empty() || data.forget_idx.empty() || data.test_idx.empty()) {
    throw InvalidArgument("evaluation needs non-empty retain, forget and test sets");
  }
  auto obj = [&](const std::vector<std::size_t>& rows) { return models::make_objective(ckpt.spec, data.data, rows); };
  const auto retain = obj(data.retain_idx);
  const auto forget = obj(data.forget_idx);
  const auto test = obj(data.test_idx);
  const ParamVector& theta = ckpt.theta;

  EvalReport r;
  r.meta = {{"role", harness::to_string(ckpt.role)},
            {"checkpoint_id", harness::checkpoint_id(ckpt)},
            {"split", data.classwise() ? "classwise" : "random"},
            {"provenance", data.provenance}};
  r.metrics.emplace_back("retain_train_acc", retain.accuracy(theta));
  r.metrics.emplace_back("forget_train_acc", forget.accuracy(theta));
  r.metrics.emplace_back("test_acc", test.accuracy(theta));
  if (data.classwise()) {
    if (data.test_retain_idx.empty() || data.test_forget_idx.empty()) {
      throw InvalidArgument("class-wise evaluation needs both test halves");
    }
    r.metrics.emplace_back("test_retain_acc", obj(data.test_retain_idx).accuracy(theta));
    r.metrics.emplace_back("test_forget_acc", obj(data.test_forget_idx).accuracy(theta));
  }
  r.metrics.emplace_back("mia", mia_score(theta, retain, test, forget));

  if (reference != nullptr) {
    if (reference->metrics.size() != r.metrics.size()) throw InvalidArgument("reference report has other metrics");
    for (std::size_t k = 0; k < r.metrics.size(); ++k) {
      if (reference->metrics[k].first != r.metrics[k].first) throw InvalidArgument("reference report has other metrics");
      r.gaps.push_back(std::abs(r.metrics[k].second - reference->metrics[k].second));
    }
    r.avg_gap = avg_gap(r.gaps);
  }
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json m = nlohmann::json::array();
  for (std::size_t k = 0; k < r.metrics.size(); ++k) {
    nlohmann::json row = {{"name", r.metrics[k].first}, {"value", r.metrics[k].second}};
    if (!r.gaps.empty()) row["gap"] = r.gaps[k];
    m.push_back(row);
  }
  return {{"meta", r.meta},
          {"metrics", m},
          {"avg_gap", r.avg_gap ? nlohmann::json(*r.avg_gap) : nlohmann::json(nullptr)}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.meta = j.at("meta");
    for (const auto& row : j.at("metrics")) {
      r.metrics.emplace_back(row.at("name").get<std::string>(), row.at("value").get<double>());
      if (row.contains("gap")) r.gaps.push_back(row.at("gap").get<double>());
    }
    if (!j.at("avg_gap").is_null()) r.avg_gap = j.at("avg_gap").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed evaluation report: ") + e.what());
  }
  if (!r.gaps.empty() && r.gaps.size() != r.metrics.size()) throw FormatError("evaluation report gaps incomplete");
  return r;
}

}  // namespace uforge::metrics
