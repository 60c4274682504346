#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include <omp.h>

#include "uforge/models/init.hpp"
#include "uforge/models/kernels.hpp"
#include "uforge/models/model_spec.hpp"
#include "uforge/numcore/rng.hpp"

namespace {

using namespace uforge;
namespace k = uforge::models::kernels;

struct Fixture {
  std::shared_ptr<data::Dataset> data;
  std::vector<std::size_t> rows;
  models::ModelSpec spec;
  ParamVector theta;
  ParamVector v;
};

Fixture make_fixture(std::size_t n) {
  Fixture f;
  f.data = std::make_shared<data::Dataset>();
  f.data->n = n;
  f.data->p = 16;
  f.data->num_classes = 10;
  RngStream rng = derive_stream(11, 1);
  for (std::size_t i = 0; i < n * f.data->p; ++i) f.data->features.push_back(rng.normal());
  for (std::size_t i = 0; i < n; ++i) f.data->labels.push_back(static_cast<std::int32_t>(rng.uniform_index(10)));
  f.rows.resize(n);
  std::iota(f.rows.begin(), f.rows.end(), 0);
  f.spec = models::make_mlp_spec(16, {32, 32}, 10);
  f.theta = models::kaiming_init(f.spec, models::InitScope::global_d, rng);
  f.v = models::kaiming_init(f.spec, models::InitScope::global_d, rng);
  return f;
}

template <bool Parallel>
void run(benchmark::State& state, k::Mode mode) {
  const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
  k::Batch b;
  b.data = f.data.get();
  b.rows = f.rows;
  for (auto _ : state) {
    k::Accumulated a = Parallel ? k::parallel::accumulate(f.spec, models::LossKind::cross_entropy, b, f.theta, f.v, mode)
                                : k::serial::accumulate(f.spec, models::LossKind::cross_entropy, b, f.theta, f.v, mode);
    benchmark::DoNotOptimize(a.loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

void BM_serial_gradient(benchmark::State& s) { run<false>(s, k::Mode::gradient); }
void BM_parallel_gradient(benchmark::State& s) { run<true>(s, k::Mode::gradient); }
void BM_serial_hvp(benchmark::State& s) { run<false>(s, k::Mode::hvp); }
void BM_parallel_hvp(benchmark::State& s) { run<true>(s, k::Mode::hvp); }

BENCHMARK(BM_serial_gradient)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(BM_parallel_gradient)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(BM_serial_hvp)->Arg(512)->Arg(4096);
BENCHMARK(BM_parallel_hvp)->Arg(512)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
