// Serial reference vs OpenMP kernels on random data shaped like the scaled
// KDD99 features (41 inputs, 6 classes).

#include <benchmark/benchmark.h>
#include <omp.h>

#include "idps/fixedpoint.hpp"
#include "idps/kernels.hpp"
#include "idps/random.hpp"

namespace {

using namespace idps;

Dataset make_data(std::size_t n) {
  Rng rng(42);
  Dataset d;
  d.features = Matrix(0, kFeatureCount);
  std::vector<double> row(kFeatureCount);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = rng.uniform01();
    d.push_back(row, static_cast<ClassId>(rng.below(kClassCount)));
  }
  return d;
}

const Network& net() {
  static const auto n = init_network(NetworkLayout{}, 1);
  return n;
}

void BM_GradientSerial(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::batch_gradient(net(), d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::batch_gradient(net(), d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}

void BM_ForwardSerial(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::batch_forward(net(), d.features));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardParallel(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::batch_forward(net(), d.features));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}

void BM_FixedForward(benchmark::State& state) {
  const auto d = make_data(1024);
  const auto q = quantize_network(net(), FixedFormat{16, 12});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(q_forward(q, d.row(i)));
    i = (i + 1) % d.size();
  }
  state.SetItemsProcessed(state.iterations());
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_num_procs();
  for (long n : {4096L, 35000L, 217720L})
    for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
}

}  // namespace

BENCHMARK(BM_GradientSerial)->Arg(4096)->Arg(35000)->Arg(217720)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ForwardSerial)->Arg(4096)->Arg(35000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardParallel)
    ->Args({4096, 4})
    ->Args({35000, 1})
    ->Args({35000, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_FixedForward);

BENCHMARK_MAIN();
