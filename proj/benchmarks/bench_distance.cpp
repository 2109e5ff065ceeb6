#include "finsler/distance.hpp"

#include <benchmark/benchmark.h>

using namespace finsler;

static void BM_GridDijkstra(benchmark::State& state) {
  const auto metric = FinslerMetric::randers(make_vec({0.5, 0.0}));
  DistanceProvider p;
  p.tier = DistanceTier::GridDijkstra;
  p.grid_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(distance(metric, Point{0.0, 0.0}, Point{1.0, 0.37}, p));
}
BENCHMARK(BM_GridDijkstra)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_CurveDescent(benchmark::State& state) {
  const auto metric = FinslerMetric::funk(2);
  DistanceProvider p;
  p.tier = DistanceTier::CurveDescent;
  p.grid_n = 64;
  for (auto _ : state) benchmark::DoNotOptimize(distance(metric, Point{-0.3, 0.1}, Point{0.5, 0.4}, p));
}
BENCHMARK(BM_CurveDescent)->Unit(benchmark::kMillisecond);
