#include <benchmark/benchmark.h>

#include "l2betti/complex_invariants.hpp"
#include "l2betti/graph_invariants.hpp"
#include "l2betti/integer_rank.hpp"

using namespace l2betti;

static void BM_BallConstruction(benchmark::State& state) {
  const OrbitGraph g = make_free_group_graph(2);
  const int radius = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Truncation t = g.ball(radius);
    benchmark::DoNotOptimize(t.cell_count(1));
  }
}
BENCHMARK(BM_BallConstruction)->DenseRange(3, 7);

static void BM_KernelTraceDense(benchmark::State& state) {
  const Truncation t = make_grid_complex(2, true).level(static_cast<int>(state.range(0)));
  const SpectralOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_trace(t, 1, 1e-2, opts).value);
  }
}
BENCHMARK(BM_KernelTraceDense)->DenseRange(2, 6);

static void BM_GraphUpperBound(benchmark::State& state) {
  const Truncation t = make_free_group_graph(2).ball(static_cast<int>(state.range(0)));
  const SpectralOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graph_beta1_upper_bound(t, opts));
  }
}
BENCHMARK(BM_GraphUpperBound)->DenseRange(4, 8);

static void BM_IntegerRank(benchmark::State& state) {
  const Truncation t = make_grid_complex(2, true).folner_truncation(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integer_rank(t.boundary[1]));
  }
}
BENCHMARK(BM_IntegerRank)->DenseRange(4, 12)->Unit(benchmark::kMillisecond);

static void BM_FolnerStep(benchmark::State& state) {
  const CofiniteComplex plane = make_grid_complex(2, true);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(folner_limit(plane, 1, {k}).last_value);
  }
}
BENCHMARK(BM_FolnerStep)->DenseRange(4, 10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
