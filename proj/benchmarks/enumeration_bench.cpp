#include <benchmark/benchmark.h>

#include "sawbound/gmatrix.hpp"
#include "sawbound/spectral.hpp"
#include "sawbound/walks.hpp"

namespace {

using namespace sawbound;

void BM_EnumerateWalksSquare(benchmark::State& state) {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto walks = enumerate_walks(lat, m, WalkMode::kSaw);
    benchmark::DoNotOptimize(walks.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnumerateWalksSquare)->DenseRange(4, 10, 2)->Complexity();

void BM_WeightedCountCubic(benchmark::State& state) {
  const LatticeSpec lat = builtin_lattice("cubic", "general");
  const std::vector<double> z = {0.31, 0.47, 0.59};
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_count(lat, n, 0, WalkMode::kSaw, z));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WeightedCountCubic)->DenseRange(4, 8, 2)->Complexity();

void BM_BuildGMatrixSquare(benchmark::State& state) {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto g = build_gmatrix(lat, 2, n, WalkMode::kSaw);
    benchmark::DoNotOptimize(g.t());
  }
}
BENCHMARK(BM_BuildGMatrixSquare)->DenseRange(4, 8, 2);

void BM_BuildGMatrixSquareSat(benchmark::State& state) {
  const LatticeSpec lat = builtin_lattice("square", "general");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto g = build_gmatrix(lat, 2, n, WalkMode::kSat);
    benchmark::DoNotOptimize(g.t());
  }
}
BENCHMARK(BM_BuildGMatrixSquareSat)->DenseRange(4, 8, 2);

void BM_DominantEigenvalue(benchmark::State& state) {
  const GMatrix g = build_gmatrix(builtin_lattice("square", "general"),
                                  static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) + 3,
                                  WalkMode::kSaw);
  const std::vector<double> z = {0.52, 0.71};
  const DenseMatrix m = eval_at(g, z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dominant_eigenvalue(m).value);
  }
}
BENCHMARK(BM_DominantEigenvalue)->DenseRange(1, 3, 1);

void BM_PrimitivityCheck(benchmark::State& state) {
  const GMatrix g = build_gmatrix(builtin_lattice("square", "general"),
                                  static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0)) + 1, WalkMode::kSaw);
  const BoolMatrix b = structure_matrix(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_primitive(b));
  }
}
BENCHMARK(BM_PrimitivityCheck)->DenseRange(2, 4, 1);

}  // namespace

BENCHMARK_MAIN();
