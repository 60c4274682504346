#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace uforge {

/// Flat dense parameter vector. Holds model weights, gradients and
/// Hessian-vector products alike. Dimension is fixed at construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  explicit ParamVector(std::vector<double> values) : data_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : data_(values) {}

  std::size_t dim() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> data_;
};

/// result_i = a * x_i + b * y_i. Throws DimensionError on size mismatch.
ParamVector axpy_merge(double a, const ParamVector& x, double b, const ParamVector& y);

double dot(const ParamVector& x, const ParamVector& y);
double norm2(const ParamVector& x);
/// Euclidean distance ||x - y||.
double distance(const ParamVector& x, const ParamVector& y);

/// y += a * x, in place.
void axpy_inplace(double a, const ParamVector& x, ParamVector& y);
void scale_inplace(double a, ParamVector& x);

/// Throws DimensionError when the two vectors differ in size.
void require_same_dim(const ParamVector& x, const ParamVector& y, const char* what);
/// Throws NonFiniteError naming `what` if any entry is NaN or Inf.
void require_finite(const ParamVector& x, const char* what);

}  // namespace uforge
