#pragma once

#include <memory>
#include <numeric>
#include <vector>

#include "uforge/data/dataset.hpp"
#include "uforge/models/objective.hpp"
#include "uforge/numcore/rng.hpp"

namespace testutil {

inline std::shared_ptr<uforge::data::Dataset> random_classification(std::size_t n, std::size_t p, int classes,
                                                                    std::uint64_t seed) {
  auto d = std::make_shared<uforge::data::Dataset>();
  d->n = n;
  d->p = p;
  d->num_classes = classes;
  uforge::RngStream rng = uforge::derive_stream(seed, 77);
  for (std::size_t i = 0; i < n * p; ++i) d->features.push_back(rng.normal());
  for (std::size_t i = 0; i < n; ++i) d->labels.push_back(static_cast<std::int32_t>(rng.uniform_index(classes)));
  return d;
}

inline std::shared_ptr<uforge::data::Dataset> random_regression(std::size_t n, std::size_t p, std::uint64_t seed) {
  auto d = std::make_shared<uforge::data::Dataset>();
  d->n = n;
  d->p = p;
  d->task = uforge::data::TaskKind::regression;
  d->num_classes = 0;
  uforge::RngStream rng = uforge::derive_stream(seed, 78);
  for (std::size_t i = 0; i < n * p; ++i) d->features.push_back(rng.normal());
  for (std::size_t i = 0; i < n; ++i) d->targets.push_back(rng.normal());
  return d;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

inline uforge::ParamVector random_theta(std::size_t d, std::uint64_t seed, double sd = 0.5) {
  uforge::ParamVector t(d);
  uforge::RngStream rng = uforge::derive_stream(seed, 79);
  uforge::normal_fill(t.span(), sd, rng);
  return t;
}

}  // namespace testutil
