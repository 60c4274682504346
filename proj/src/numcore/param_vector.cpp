#include "uforge/numcore/param_vector.hpp"

#include <cmath>
#include <string>

#include "uforge/numcore/error.hpp"

namespace uforge {

bool ParamVector::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_dim(const ParamVector& x, const ParamVector& y, const char* what) {
  if (x.dim() != y.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(x.dim()) +
                         " vs " + std::to_string(y.dim()) + ")");
  }
}

void require_finite(const ParamVector& x, const char* what) {
  if (!x.all_finite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

ParamVector axpy_merge(double a, const ParamVector& x, double b, const ParamVector& y) {
  require_same_dim(x, y, "axpy_merge");
  ParamVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

double dot(const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const ParamVector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y, "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void axpy_inplace(double a, const ParamVector& x, ParamVector& y) {
  require_same_dim(x, y, "axpy_inplace");
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] += a * x[i];
}

void scale_inplace(double a, ParamVector& x) {
  for (double& v : x) v *= a;
}

}  // namespace uforge
