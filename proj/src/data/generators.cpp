#include "uforge/data/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::data {

namespace {

constexpr std::uint64_t kCenterTag = 0x63656e74;
constexpr std::uint64_t kPointTag = 0x706f696e;
constexpr std::uint64_t kSplitTag = 0x73706c74;

SplitDataset unsplit_copy(const SplitDataset& ds) {
  if (!ds.data) throw InvalidArgument("split needs a dataset");
  if (ds.train_idx.empty()) throw InvalidArgument("split needs a non-empty train partition");
  SplitDataset out;
  out.data = ds.data;
  out.train_idx = ds.train_idx;
  out.test_idx = ds.test_idx;
  out.provenance = ds.provenance;
  return out;
}

}  // namespace

SplitDataset gen_blobs(const BlobsConfig& cfg, std::uint64_t seed) {
  if (cfg.num_classes < 2) throw InvalidArgument("blobs need at least two classes");
  if (cfg.dim < 2) throw InvalidArgument("blobs need dimension >= 2");
  if (cfg.n_per_class < 5) throw InvalidArgument("blobs need at least 5 examples per class");
  if (!(cfg.separation >= 0.0) || !(cfg.noise_sd >= 0.0)) throw InvalidArgument("negative separation or noise");
  const auto C = static_cast<std::size_t>(cfg.num_classes);
  const auto p = static_cast<std::size_t>(cfg.dim);
  const double box = cfg.center_box > 0.0
                         ? cfg.center_box
                         : cfg.separation * std::max(1.0, std::pow(static_cast<double>(C), 1.0 / cfg.dim));

  RngStream root = derive_stream(seed, 0);
  RngStream crng = root.child(kCenterTag);
  std::vector<double> centers(C * p);
  for (std::size_t c = 0; c < C; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_center_retries && !placed; ++attempt) {
      for (std::size_t j = 0; j < p; ++j) centers[c * p + j] = box * (2.0 * crng.uniform() - 1.0);
      placed = true;
      for (std::size_t o = 0; o < c && placed; ++o) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          const double diff = centers[c * p + j] - centers[o * p + j];
          d2 += diff * diff;
        }
        placed = std::sqrt(d2) >= cfg.separation;
      }
    }
    if (!placed) throw InvalidArgument("could not place blob centers at the requested separation");
  }

  auto ds = std::make_shared<Dataset>();
  const auto npc = static_cast<std::size_t>(cfg.n_per_class);
  ds->n = C * npc;
  ds->p = p;
  ds->task = TaskKind::classification;
  ds->num_classes = cfg.num_classes;
  ds->features.resize(ds->n * p);
  ds->labels.resize(ds->n);
  RngStream prng = root.child(kPointTag);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < npc; ++k) {
      const std::size_t i = c * npc + k;
      ds->labels[i] = static_cast<std::int32_t>(c);
      for (std::size_t j = 0; j < p; ++j) ds->features[i * p + j] = centers[c * p + j] + cfg.noise_sd * prng.normal();
    }
  }

  SplitDataset out;
  const auto n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(npc)));
  RngStream srng = root.child(kSplitTag);
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<std::size_t> idx(npc);
    std::iota(idx.begin(), idx.end(), c * npc);
    shuffle(std::span<std::size_t>(idx), srng);
    out.test_idx.insert(out.test_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train_idx.insert(out.train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());
  out.retain_idx = out.train_idx;
  out.data = std::move(ds);
  out.provenance = {{"generator", "blobs"},
                    {"n_per_class", cfg.n_per_class},
                    {"num_classes", cfg.num_classes},
                    {"dim", cfg.dim},
                    {"separation", cfg.separation},
                    {"noise_sd", cfg.noise_sd},
                    {"center_box", box},
                    {"seed", seed}};
  validate(out);
  return out;
}

QuadraticTask gen_quadratic_task(std::vector<double> spectrum, ParamVector theta_star, double l_star,
                                 std::vector<double> forget_spectrum, ParamVector forget_theta_star,
                                 double forget_l_star) {
  if (theta_star.dim() != forget_theta_star.dim()) throw DimensionError("retain and forget optima differ in dimension");
  return QuadraticTask{models::make_quadratic(std::move(spectrum), std::move(theta_star), l_star),
                       models::make_quadratic(std::move(forget_spectrum), std::move(forget_theta_star),
                                              forget_l_star)};
}

ParamVector expected_ieu_fixed_point(const QuadraticTask& task, double alpha, double c, double eta) {
  const auto& r = *task.retain.spec().quadratic;
  const auto& f = *task.forget.spec().quadratic;
  const std::size_t d = r.spectrum.size();
  ParamVector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double coef = (1.0 - alpha) + eta * r.spectrum[i] - c * eta * f.spectrum[i];
    if (std::abs(coef) < 1e-300) throw InvalidArgument("expected update has no unique fixed point");
    out[i] = (eta * r.spectrum[i] * r.theta_star[i] - c * eta * f.spectrum[i] * f.theta_star[i]) / coef;
  }
  return out;
}

SplitDataset split_random(const SplitDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("forget fraction must lie in (0, 1)");
  SplitDataset out = unsplit_copy(ds);
  const std::size_t n = out.train_idx.size();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (k == 0 || k == n) throw InvalidArgument("forget fraction leaves an empty forget or retain set");
  std::vector<std::size_t> pool = out.train_idx;
  RngStream rng = derive_stream(seed, kSplitTag);
  shuffle(std::span<std::size_t>(pool), rng);
  out.forget_idx.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.forget_idx.begin(), out.forget_idx.end());
  std::set_difference(out.train_idx.begin(), out.train_idx.end(), out.forget_idx.begin(), out.forget_idx.end(),
                      std::back_inserter(out.retain_idx));
  out.provenance["split"] = {{"mode", "random"}, {"fraction", fraction}, {"seed", seed}};
  validate(out);
  return out;
}

SplitDataset split_classwise(const SplitDataset& ds, double fraction, std::uint64_t seed) {
  SplitDataset out = unsplit_copy(ds);
  const Dataset& d = *out.data;
  if (!d.is_classification()) throw InvalidArgument("class-wise split needs a classification dataset");
  const int C = d.num_classes;
  const auto k = static_cast<int>(std::lround(fraction * C));
  if (k <= 0 || k >= C) throw InvalidArgument("class-wise fraction must forget between 1 and C-1 classes");
  std::vector<int> classes(static_cast<std::size_t>(C));
  std::iota(classes.begin(), classes.end(), 0);
  RngStream rng = derive_stream(seed, kSplitTag);
  shuffle(std::span<int>(classes), rng);
  out.forgotten_classes.assign(classes.begin(), classes.begin() + k);
  std::sort(out.forgotten_classes.begin(), out.forgotten_classes.end());
  auto forgotten = [&](std::size_t i) {
    return std::binary_search(out.forgotten_classes.begin(), out.forgotten_classes.end(), d.labels[i]);
  };
  for (std::size_t i : out.train_idx) (forgotten(i) ? out.forget_idx : out.retain_idx).push_back(i);
  for (std::size_t i : out.test_idx) (forgotten(i) ? out.test_forget_idx : out.test_retain_idx).push_back(i);
  if (out.retain_idx.empty() || out.forget_idx.empty()) {
    throw InvalidArgument("class-wise split leaves an empty forget or retain set");
  }
  out.provenance["split"] = {{"mode", "classwise"}, {"fraction", fraction}, {"seed", seed}};
  validate(out);
  return out;
}

}  // namespace uforge::data
