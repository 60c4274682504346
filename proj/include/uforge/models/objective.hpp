#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "uforge/data/dataset.hpp"
#include "uforge/models/model_spec.hpp"
#include "uforge/numcore/param_vector.hpp"

namespace uforge::models {

/// Rows of a dataset an objective averages over, with optional per-row label
/// overrides (random relabeling) or soft targets (distillation).
struct DataView {
  std::shared_ptr<const data::Dataset> data;
  std::vector<std::size_t> rows;
  std::vector<std::int32_t> label_override;  // empty, or one per row
  std::vector<double> soft_targets;          // empty, or rows.size() * num_classes

  std::size_t size() const noexcept { return rows.size(); }
};

/// Differentiable training objective: mean per-example loss over a data view
/// plus weight decay, or an analytic quadratic. Immutable; every method is
/// pure and safe to call concurrently.
class Objective {
 public:
  Objective(ModelSpec spec, LossKind loss, DataView view);

  const ModelSpec& spec() const noexcept { return spec_; }
  LossKind loss_kind() const noexcept { return loss_; }
  const DataView& view() const noexcept { return view_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Number of examples (1 for a quadratic).
  std::size_t size() const noexcept;
  bool is_classification() const noexcept;
  bool is_quadratic() const noexcept { return spec_.kind == ModelKind::quadratic; }

  double value(const ParamVector& theta) const;
  ParamVector gradient(const ParamVector& theta) const;
  std::pair<double, ParamVector> value_and_gradient(const ParamVector& theta) const;
  /// Exact Hessian-vector product (forward-over-reverse for networks).
  ParamVector hvp(const ParamVector& theta, const ParamVector& v) const;

  /// Fraction of argmax-correct predictions; ties go to the lowest class.
  double accuracy(const ParamVector& theta) const;
  std::vector<int> predict(const ParamVector& theta) const;
  /// Softmax outputs, rows x num_classes.
  std::vector<double> probabilities(const ParamVector& theta) const;
  /// Per-example loss without weight decay.
  std::vector<double> per_example_loss(const ParamVector& theta) const;

  /// Objective over a subset of this view's rows (positions into view().rows).
  Objective subset(std::span<const std::size_t> positions) const;

 private:
  void check_theta(const ParamVector& theta) const;

  ModelSpec spec_;
  LossKind loss_;
  DataView view_;
  std::size_t dim_;
};

/// Analytic quadratic objective 1/2 (theta - theta*)^T diag(spectrum) (theta - theta*) + l_star.
Objective make_quadratic(std::vector<double> spectrum, ParamVector theta_star, double l_star);

/// Objective over the given rows of `data`, with the default loss for the
/// task (cross-entropy for classification, MSE for regression).
Objective make_objective(const ModelSpec& spec, std::shared_ptr<const data::Dataset> data,
                         std::vector<std::size_t> rows);

/// Condition number beta/mu of a quadratic objective.
double quadratic_condition_number(const Objective& obj);

}  // namespace uforge::models
