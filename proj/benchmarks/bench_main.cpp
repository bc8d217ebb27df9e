#include <benchmark/benchmark.h>

#include "vm3b/equilibria.hpp"
#include "vm3b/primaries.hpp"
#include "vm3b/third_body.hpp"

using namespace vm3b;

namespace {

void BM_PropagateLinearLaw(benchmark::State& state) {
  SystemConfig cfg;
  cfg.nu = 0.01215;
  cfg.law = MassLaw::linear(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_primaries(cfg, {0.0, 10.0}, {}));
}
BENCHMARK(BM_PropagateLinearLaw);

void BM_Collinear(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(collinear(0.01215));
}
BENCHMARK(BM_Collinear);

void BM_Coplanar(benchmark::State& state) {
  const double nu = state.range(0) / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(coplanar(nu, 2.0));
}
BENCHMARK(BM_Coplanar)->Arg(500)->Arg(300)->Arg(12);

void BM_SimulateL4(benchmark::State& state) {
  SystemConfig cfg;
  cfg.nu = 0.01215;
  cfg.law = MassLaw::linear(0.1);
  const auto eph = propagate_primaries(cfg, {0.0, 10.0}, {});
  const Vec3 l4 = triangular(cfg.nu)[0].coords();
  const auto seed = self_similar_seed(eph, l4, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, eph, seed, {0.0, 10.0}, {}));
}
BENCHMARK(BM_SimulateL4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
