#pragma once

#include <cstdint>
#include <vector>

#include "uforge/data/dataset.hpp"
#include "uforge/models/objective.hpp"

namespace uforge::data {

struct BlobsConfig {
  int n_per_class = 100;
  int num_classes = 3;
  int dim = 2;
  double separation = 4.0;
  double noise_sd = 1.0;
  /// Centers are drawn uniformly from [-box, box]^dim. Zero selects
  /// separation * max(1, C^(1/dim)), which always leaves room for the centers.
  double center_box = 0.0;
  int max_center_retries = 1000;
};

/// Gaussian clusters with seed-deterministic centers at pairwise distance
/// >= separation, stratified 80/20 train/test split. The result is unsplit:
/// retain = train, forget empty.
SplitDataset gen_blobs(const BlobsConfig& cfg, std::uint64_t seed);

/// Retain and forget quadratic objectives with independent curvature and
/// optima, for conflicting-gradient scenarios.
struct QuadraticTask {
  models::Objective retain;
  models::Objective forget;
};

QuadraticTask gen_quadratic_task(std::vector<double> spectrum, ParamVector theta_star, double l_star,
                                 std::vector<double> forget_spectrum, ParamVector forget_theta_star,
                                 double forget_l_star = 0.0);

/// Fixed point of the noise-free update
///   theta <- alpha*theta - eta*grad_r(theta) + c*eta*grad_f(theta)
/// on a quadratic task (the expected update when the re-init draw has mean 0).
/// Coordinate-wise closed form; throws InvalidArgument when the stationarity
/// system is singular.
ParamVector expected_ieu_fixed_point(const QuadraticTask& task, double alpha, double c, double eta);

/// Forget a seeded uniform sample of floor(fraction * |train|) train examples.
SplitDataset split_random(const SplitDataset& ds, double fraction, std::uint64_t seed);

/// Forget every train example of round(fraction * C) seeded-random classes;
/// the test set is partitioned into test_retain / test_forget accordingly.
SplitDataset split_classwise(const SplitDataset& ds, double fraction, std::uint64_t seed);

}  // namespace uforge::data
