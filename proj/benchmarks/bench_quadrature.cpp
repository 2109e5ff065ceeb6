#include "finsler/sphere_bundle.hpp"

#include <benchmark/benchmark.h>

using namespace finsler;

static void BM_IntegrateSM(benchmark::State& state) {
  const auto metric = FinslerMetric::randers(make_vec({0.4, 0.2}));
  const auto domain = Domain::box(make_vec({-3, -3}), make_vec({3, 3}), static_cast<int>(state.range(0)));
  const auto rule = FiberQuadrature::make(2, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_SM(metric, domain, [](const Vec& x, const Vec&) { return x.squaredNorm(); }, rule));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(domain.node_count()) * 64);
}
BENCHMARK(BM_IntegrateSM)->Arg(32)->Arg(64)->Arg(128);

static void BM_StryConstant(benchmark::State& state) {
  const auto metric = FinslerMetric::quartic(2, 0.1);
  const auto domain = Domain::box(make_vec({-1, -1}), make_vec({1, 1}), 16);
  for (auto _ : state) benchmark::DoNotOptimize(stry_constant(metric, domain, 400));
}
BENCHMARK(BM_StryConstant);
