#include "uforge/models/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uforge/models/kernels.hpp"
#include "uforge/numcore/error.hpp"

namespace uforge::models {

namespace {

kernels::Batch batch_of(const DataView& view) {
  return kernels::Batch{view.data.get(), view.rows, view.label_override, view.soft_targets};
}

}  // namespace

Objective::Objective(ModelSpec spec, LossKind loss, DataView view)
    : spec_(std::move(spec)), loss_(loss), view_(std::move(view)) {
  validate(spec_);
  dim_ = spec_.param_count();
  if (spec_.kind == ModelKind::quadratic) {
    if (loss_ != LossKind::quadratic_form) throw InvalidArgument("quadratic model needs quadratic_form loss");
    return;
  }
  if (loss_ == LossKind::quadratic_form) throw InvalidArgument("quadratic_form loss needs a quadratic model");
  if (!view_.data) throw InvalidArgument("objective without data");
  const data::Dataset& ds = *view_.data;
  if (ds.p != static_cast<std::size_t>(spec_.input_dim)) {
    throw DimensionError("dataset has " + std::to_string(ds.p) + " features, model expects " +
                         std::to_string(spec_.input_dim));
  }
  if (ds.is_classification()) {
    if (ds.num_classes != spec_.num_classes) throw DimensionError("dataset/model class count mismatch");
  } else {
    if (spec_.num_classes != 1) throw DimensionError("regression models have one output");
    if (loss_ != LossKind::mse) throw InvalidArgument("regression needs mse loss");
  }
  for (std::size_t r : view_.rows) {
    if (r >= ds.n) throw InvalidArgument("data view row out of range");
  }
  if (!view_.label_override.empty() && view_.label_override.size() != view_.rows.size()) {
    throw DimensionError("label override length differs from row count");
  }
  for (auto y : view_.label_override) {
    if (y < 0 || y >= spec_.num_classes) throw InvalidArgument("label override out of range");
  }
  if (!view_.soft_targets.empty() &&
      view_.soft_targets.size() != view_.rows.size() * static_cast<std::size_t>(spec_.num_classes)) {
    throw DimensionError("soft target matrix has the wrong size");
  }
}

std::size_t Objective::size() const noexcept { return is_quadratic() ? 1 : view_.rows.size(); }

bool Objective::is_classification() const noexcept {
  return !is_quadratic() && view_.data && view_.data->is_classification();
}

void Objective::check_theta(const ParamVector& theta) const {
  if (theta.dim() != dim_) {
    throw DimensionError("theta has dimension " + std::to_string(theta.dim()) + ", model needs " +
                         std::to_string(dim_));
  }
  if (!is_quadratic() && view_.rows.empty()) throw InvalidArgument("objective over an empty data view");
}

double Objective::value(const ParamVector& theta) const {
  check_theta(theta);
  if (is_quadratic()) {
    const auto& q = *spec_.quadratic;
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double r = theta[i] - q.theta_star[i];
      s += q.spectrum[i] * r * r;
    }
    return 0.5 * s + q.l_star;
  }
  const auto acc = kernels::parallel::accumulate(spec_, loss_, batch_of(view_), theta.span(), {},
                                                 kernels::Mode::value);
  double v = acc.loss_sum / static_cast<double>(view_.rows.size());
  if (spec_.weight_decay > 0.0) v += 0.5 * spec_.weight_decay * dot(theta, theta);
  return v;
}

std::pair<double, ParamVector> Objective::value_and_gradient(const ParamVector& theta) const {
  check_theta(theta);
  if (is_quadratic()) {
    const auto& q = *spec_.quadratic;
    ParamVector g(dim_);
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double r = theta[i] - q.theta_star[i];
      g[i] = q.spectrum[i] * r;
      s += q.spectrum[i] * r * r;
    }
    return {0.5 * s + q.l_star, std::move(g)};
  }
  auto acc = kernels::parallel::accumulate(spec_, loss_, batch_of(view_), theta.span(), {},
                                           kernels::Mode::gradient);
  const double inv_n = 1.0 / static_cast<double>(view_.rows.size());
  ParamVector g(std::move(acc.grad_sum));
  scale_inplace(inv_n, g);
  double v = acc.loss_sum * inv_n;
  if (spec_.weight_decay > 0.0) {
    v += 0.5 * spec_.weight_decay * dot(theta, theta);
    axpy_inplace(spec_.weight_decay, theta, g);
  }
  return {v, std::move(g)};
}

ParamVector Objective::gradient(const ParamVector& theta) const { return value_and_gradient(theta).second; }

ParamVector Objective::hvp(const ParamVector& theta, const ParamVector& v) const {
  check_theta(theta);
  require_same_dim(theta, v, "hvp");
  if (is_quadratic()) {
    const auto& q = *spec_.quadratic;
    ParamVector out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = q.spectrum[i] * v[i];
    return out;
  }
  auto acc = kernels::parallel::accumulate(spec_, loss_, batch_of(view_), theta.span(), v.span(),
                                           kernels::Mode::hvp);
  ParamVector out(std::move(acc.hvp_sum));
  scale_inplace(1.0 / static_cast<double>(view_.rows.size()), out);
  if (spec_.weight_decay > 0.0) axpy_inplace(spec_.weight_decay, v, out);
  return out;
}

std::vector<int> Objective::predict(const ParamVector& theta) const {
  if (!is_classification()) throw InvalidArgument("predictions need a classification objective");
  check_theta(theta);
  const auto c = static_cast<std::size_t>(spec_.num_classes);
  std::vector<double> z(view_.rows.size() * c);
  kernels::parallel::logits(spec_, batch_of(view_), theta.span(), z);
  std::vector<int> out(view_.rows.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto first = z.begin() + static_cast<std::ptrdiff_t>(k * c);
    // max_element returns the first maximum: ties go to the lowest class.
    out[k] = static_cast<int>(std::max_element(first, first + static_cast<std::ptrdiff_t>(c)) - first);
  }
  return out;
}

double Objective::accuracy(const ParamVector& theta) const {
  const auto pred = predict(theta);
  const data::Dataset& ds = *view_.data;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const int y = view_.label_override.empty() ? ds.labels[view_.rows[k]] : view_.label_override[k];
    if (pred[k] == y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

std::vector<double> Objective::probabilities(const ParamVector& theta) const {
  if (!is_classification()) throw InvalidArgument("probabilities need a classification objective");
  check_theta(theta);
  const auto c = static_cast<std::size_t>(spec_.num_classes);
  std::vector<double> z(view_.rows.size() * c);
  kernels::parallel::logits(spec_, batch_of(view_), theta.span(), z);
  for (std::size_t k = 0; k < view_.rows.size(); ++k) {
    std::span<double> row(z.data() + k * c, c);
    const double lse = kernels::log_sum_exp(row);
    for (double& v : row) v = std::exp(v - lse);
  }
  return z;
}

std::vector<double> Objective::per_example_loss(const ParamVector& theta) const {
  check_theta(theta);
  if (is_quadratic()) return {value(theta)};
  const auto c = static_cast<std::size_t>(spec_.num_classes);
  const data::Dataset& ds = *view_.data;
  std::vector<double> z(view_.rows.size() * c);
  kernels::parallel::logits(spec_, batch_of(view_), theta.span(), z);
  std::vector<double> out(view_.rows.size());
  std::vector<double> t(c);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::span<const double> row(z.data() + k * c, c);
    if (!view_.soft_targets.empty()) {
      std::copy_n(view_.soft_targets.begin() + static_cast<std::ptrdiff_t>(k * c), c, t.begin());
    } else if (ds.is_classification()) {
      std::fill(t.begin(), t.end(), 0.0);
      const int y = view_.label_override.empty() ? ds.labels[view_.rows[k]] : view_.label_override[k];
      t[static_cast<std::size_t>(y)] = 1.0;
    } else {
      t[0] = ds.targets[view_.rows[k]];
    }
    double l = 0.0;
    if (loss_ == LossKind::cross_entropy) {
      const double lse = kernels::log_sum_exp(row);
      for (std::size_t j = 0; j < c; ++j) l += t[j] * (lse - row[j]);
    } else {
      for (std::size_t j = 0; j < c; ++j) l += 0.5 * (row[j] - t[j]) * (row[j] - t[j]);
    }
    out[k] = l;
  }
  return out;
}

Objective Objective::subset(std::span<const std::size_t> positions) const {
  if (is_quadratic()) return *this;
  DataView v;
  v.data = view_.data;
  v.rows.reserve(positions.size());
  const auto c = static_cast<std::size_t>(spec_.num_classes);
  for (std::size_t k : positions) {
    if (k >= view_.rows.size()) throw InvalidArgument("subset position out of range");
    v.rows.push_back(view_.rows[k]);
    if (!view_.label_override.empty()) v.label_override.push_back(view_.label_override[k]);
    if (!view_.soft_targets.empty()) {
      v.soft_targets.insert(v.soft_targets.end(), view_.soft_targets.begin() + static_cast<std::ptrdiff_t>(k * c),
                            view_.soft_targets.begin() + static_cast<std::ptrdiff_t>((k + 1) * c));
    }
  }
  return Objective(spec_, loss_, std::move(v));
}

Objective make_quadratic(std::vector<double> spectrum, ParamVector theta_star, double l_star) {
  return Objective(make_quadratic_spec(std::move(spectrum), std::move(theta_star), l_star),
                   LossKind::quadratic_form, DataView{});
}

Objective make_objective(const ModelSpec& spec, std::shared_ptr<const data::Dataset> data,
                         std::vector<std::size_t> rows) {
  const LossKind loss = data && !data->is_classification() ? LossKind::mse : LossKind::cross_entropy;
  DataView v;
  v.data = std::move(data);
  v.rows = std::move(rows);
  return Objective(spec, loss, std::move(v));
}

double quadratic_condition_number(const Objective& obj) {
  if (!obj.is_quadratic()) throw InvalidArgument("condition number from spectrum needs a quadratic");
  const auto& q = *obj.spec().quadratic;
  return q.beta() / q.mu();
}

}  // namespace uforge::models
