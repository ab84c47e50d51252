#include <benchmark/benchmark.h>

#include "bcmf/binding.hpp"
#include "bcmf/certify.hpp"
#include "bcmf/laps.hpp"
#include "bcmf/ldp.hpp"
#include "bcmf/thermo.hpp"

using namespace bcmf;

// Critical orbit to the certify horizon at each precision tier.
static void BM_Certify(benchmark::State& state) {
  QuadraticMap f(1.9, static_cast<int>(state.range(0)));
  CertificationConfig cfg;
  cfg.horizon = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(check_a2(f, cfg).margin);
}
BENCHMARK(BM_Certify)->Arg(53)->Arg(64)->Arg(113)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_LyapunovMonteCarlo(benchmark::State& state) {
  QuadraticMap f(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_monte_carlo(f, 100000, 10, 1).mean);
  state.SetItemsProcessed(state.iterations() * 1000000);
}
BENCHMARK(BM_LyapunovMonteCarlo)->Unit(benchmark::kMillisecond);

static void BM_CriticalPartition(benchmark::State& state) {
  QuadraticMap f(2.0, 128);
  BindingConfig bc;
  bc.N = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_critical_partition(f, bc).elements.size());
}
BENCHMARK(BM_CriticalPartition)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Laps(benchmark::State& state) {
  QuadraticMap f(2.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(for_each_lap(f, -1.0, 1.0, n, [](const Lap&) {}));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_Laps)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_EnumerateCylinders(benchmark::State& state) {
  QuadraticMap f(2.0);
  const auto h = lap_horseshoe(f, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_cylinders(h, {Observable::identity()}, 2).words());
}
BENCHMARK(BM_EnumerateCylinders)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_EquilibriumStats(benchmark::State& state) {
  QuadraticMap f(2.0);
  const auto cd = enumerate_cylinders(lap_horseshoe(f, 8), {Observable::identity()}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_stats(cd, 0.7, 1.5).h);
}
BENCHMARK(BM_EquilibriumStats)->Unit(benchmark::kMillisecond);

static void BM_FreeEnergyQuadrature(benchmark::State& state) {
  QuadraticMap f(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(free_energy_quadrature(f, Observable::identity(), 14, static_cast<unsigned>(state.range(0))).value);
}
BENCHMARK(BM_FreeEnergyQuadrature)->Arg(7)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_DeviationTilted(benchmark::State& state) {
  QuadraticMap f(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        deviation_probability_tilted(f, Observable::identity(), 0.3, 0.5, 30, 20000, 1).log_measure_rate);
}
BENCHMARK(BM_DeviationTilted)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
