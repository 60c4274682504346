#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uforge/data/dataset.hpp"
#include "uforge/models/model_spec.hpp"

namespace uforge::models::kernels {

enum class Mode { value, gradient, hvp };

/// Examples to sweep. label_override / soft_targets are empty or aligned
/// with rows.
struct Batch {
  const data::Dataset* data = nullptr;
  std::span<const std::size_t> rows;
  std::span<const std::int32_t> label_override;
  std::span<const double> soft_targets;
};

/// Sums (not means) over the batch. grad_sum is filled in Mode::gradient,
/// hvp_sum in Mode::hvp.
struct Accumulated {
  double loss_sum = 0.0;
  std::vector<double> grad_sum;
  std::vector<double> hvp_sum;
};

/// Examples per reduction block in the parallel kernels. Partial sums are
/// combined in block order, so results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 32;

namespace serial {
/// Reference implementation: one running sum over examples in order.
Accumulated accumulate(const ModelSpec& spec, LossKind loss, const Batch& batch,
                       std::span<const double> theta, std::span<const double> v, Mode mode);
void logits(const ModelSpec& spec, const Batch& batch, std::span<const double> theta,
            std::span<double> out);
}  // namespace serial

namespace parallel {
/// OpenMP version: fixed-size blocks reduced in parallel, combined serially.
Accumulated accumulate(const ModelSpec& spec, LossKind loss, const Batch& batch,
                       std::span<const double> theta, std::span<const double> v, Mode mode);
void logits(const ModelSpec& spec, const Batch& batch, std::span<const double> theta,
            std::span<double> out);
}  // namespace parallel

/// Numerically stable log-sum-exp (max subtracted).
double log_sum_exp(std::span<const double> z);

}  // namespace uforge::models::kernels
