#include "finsler/sobolev.hpp"

#include <benchmark/benchmark.h>

using namespace finsler;

static void BM_SobolevNorm(benchmark::State& state) {
  const auto metric = FinslerMetric::quartic(2, 0.1);
  const auto domain = Domain::box(make_vec({-6, -6}), make_vec({6, 6}), static_cast<int>(state.range(0)));
  const auto rule = FiberQuadrature::make(2, 64);
  const auto u = fields::gaussian(2);
  for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(metric, u, {1, 2.0}, domain, rule));
}
BENCHMARK(BM_SobolevNorm)->Arg(64)->Arg(128);

static void BM_DualNorm(benchmark::State& state) {
  const auto metric = FinslerMetric::funk(2);
  const Point x{0.3, -0.2};
  const Vec xi = make_vec({0.7, 1.1});
  for (auto _ : state) benchmark::DoNotOptimize(dual_norm(metric, x, xi));
}
BENCHMARK(BM_DualNorm);
