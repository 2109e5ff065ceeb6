#include "finsler/mollifier.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace finsler;

static void BM_MollifyBox(benchmark::State& state) {
  const auto domain = Domain::box(make_vec({-4, -4}), make_vec({4, 4}), static_cast<int>(state.range(0)));
  const auto spec = MollifierSpec::make(2, 0.5);
  const auto u = fields::gaussian(2);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(u, spec, domain).grid);
}
BENCHMARK(BM_MollifyBox)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MollifyTorus(benchmark::State& state) {
  const double P = 2.0 * std::numbers::pi;
  const auto domain = Domain::torus(make_vec({P, P}), static_cast<int>(state.range(0)));
  const auto spec = MollifierSpec::make(2, 0.25);
  const auto u = fields::trig(make_vec({1, 2}), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(u, spec, domain).grid);
}
BENCHMARK(BM_MollifyTorus)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
