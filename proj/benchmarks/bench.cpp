#include <benchmark/benchmark.h>

#include <cmath>

#include "aerocov/analysis.hpp"
#include "aerocov/quadrature.hpp"
#include "aerocov/simulator.hpp"

using namespace aerocov;

static void BM_Kronrod_Smooth(benchmark::State& state) {
  const quad::Tolerance tol{1e-10, 1e-14};
  for (auto _ : state) {
    auto r = quad::integrate([](double x) { return std::exp(-x) * std::cos(x); }, 0.0, 30.0, tol);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_Kronrod_Smooth);

static void BM_Kronrod_PowerTail(benchmark::State& state) {
  const quad::Tolerance tol{1e-10, 1e-14};
  for (auto _ : state) {
    auto r = quad::integrate_tail([](double t) { return t / (1.0 + t * t); }, 100.0, 2e4, tol);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_Kronrod_PowerTail);

static void BM_Laplace(benchmark::State& state) {
  const NetworkAnalysis an(dense_urban_scenario(5, 100));
  const LinkClass link = state.range(0) ? LinkClass::los : LinkClass::nlos;
  for (auto _ : state) {
    benchmark::DoNotOptimize(an.laplace_interference({1e10, {link, 150.0}}));
  }
}
BENCHMARK(BM_Laplace)->Arg(0)->Arg(1);

static void BM_Coverage(benchmark::State& state) {
  const NetworkAnalysis an(dense_urban_scenario(5, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(an.coverage(1.0).value);
}
BENCHMARK(BM_Coverage)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_Rate(benchmark::State& state) {
  const NetworkAnalysis an(dense_urban_scenario(5, 100));
  for (auto _ : state) benchmark::DoNotOptimize(an.rate().value);
}
BENCHMARK(BM_Rate)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_DistanceLawBuild(benchmark::State& state) {
  const Scenario sc = dense_urban_scenario(5, 100);
  for (auto _ : state) {
    DistanceLaw law(sc.env, sc.dep, sc.num);
    benchmark::DoNotOptimize(law.window());
  }
}
BENCHMARK(BM_DistanceLawBuild)->Unit(benchmark::kMillisecond);

static void BM_RunTrial(benchmark::State& state) {
  const Scenario sc = dense_urban_scenario(5, 100);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = trial_rng(1, i++);
    benchmark::DoNotOptimize(run_trial(sc.env, sc.dep, sc.num, rng).sinr);
  }
}
BENCHMARK(BM_RunTrial)->Unit(benchmark::kMicrosecond);

static void BM_GeometryTrial(benchmark::State& state) {
  const Scenario sc = dense_urban_scenario(5, 100);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = trial_rng(1, i++);
    benchmark::DoNotOptimize(run_geometry_trial(sc.env, sc.dep, sc.num, rng).serving_distance);
  }
}
BENCHMARK(BM_GeometryTrial)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
