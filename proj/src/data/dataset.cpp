#include "uforge/data/dataset.hpp"

#include <algorithm>
#include <string>

#include "uforge/numcore/error.hpp"

namespace uforge::data {

namespace {

void check_sorted_in_range(const std::vector<std::size_t>& idx, std::size_t n, const char* name) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= n) throw InvalidArgument(std::string(name) + ": index out of range");
    if (k > 0 && idx[k] <= idx[k - 1]) throw InvalidArgument(std::string(name) + ": indices not strictly ascending");
  }
}

bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j]) ++i; else ++j;
  }
  return true;
}

std::vector<std::size_t> merged(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void validate(const SplitDataset& ds) {
  if (!ds.data) throw InvalidArgument("split dataset without data");
  const Dataset& d = *ds.data;
  if (d.features.size() != d.n * d.p) throw InvalidArgument("feature matrix size differs from n*p");
  if (d.is_classification()) {
    if (d.labels.size() != d.n) throw InvalidArgument("label count differs from n");
    if (d.num_classes < 2) throw InvalidArgument("classification needs at least two classes");
    for (auto y : d.labels) {
      if (y < 0 || y >= d.num_classes) throw InvalidArgument("label out of range");
    }
  } else if (d.targets.size() != d.n) {
    throw InvalidArgument("target count differs from n");
  }
  check_sorted_in_range(ds.train_idx, d.n, "train");
  check_sorted_in_range(ds.test_idx, d.n, "test");
  check_sorted_in_range(ds.retain_idx, d.n, "retain");
  check_sorted_in_range(ds.forget_idx, d.n, "forget");
  check_sorted_in_range(ds.test_retain_idx, d.n, "test_retain");
  check_sorted_in_range(ds.test_forget_idx, d.n, "test_forget");
  if (!disjoint(ds.train_idx, ds.test_idx)) throw InvalidArgument("train and test overlap");
  if (!disjoint(ds.retain_idx, ds.forget_idx)) throw InvalidArgument("retain and forget overlap");
  if (merged(ds.retain_idx, ds.forget_idx) != ds.train_idx) throw InvalidArgument("retain and forget do not cover train");

  if (!ds.classwise()) {
    if (!ds.test_retain_idx.empty() || !ds.test_forget_idx.empty()) {
      throw InvalidArgument("test halves are only defined for class-wise splits");
    }
    return;
  }
  if (!d.is_classification()) throw InvalidArgument("class-wise split on a regression dataset");
  auto forgotten = [&](std::size_t i) {
    return std::find(ds.forgotten_classes.begin(), ds.forgotten_classes.end(), d.labels[i]) !=
           ds.forgotten_classes.end();
  };
  for (std::size_t i : ds.train_idx) {
    const bool in_forget = std::binary_search(ds.forget_idx.begin(), ds.forget_idx.end(), i);
    if (in_forget != forgotten(i)) throw InvalidArgument("forget set differs from the forgotten classes");
  }
  if (merged(ds.test_retain_idx, ds.test_forget_idx) != ds.test_idx) {
    throw InvalidArgument("test halves do not partition test");
  }
  for (std::size_t i : ds.test_forget_idx) {
    if (!forgotten(i)) throw InvalidArgument("test_forget holds a retained class");
  }
  for (std::size_t i : ds.test_retain_idx) {
    if (forgotten(i)) throw InvalidArgument("test_retain holds a forgotten class");
  }
}

}  // namespace uforge::data
