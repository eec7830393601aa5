#include <benchmark/benchmark.h>

#include "shum/hum.hpp"
#include "shum/simulate.hpp"
#include "shum/smooth.hpp"

namespace {

shum::MarkerDataset draw(std::size_t n) {
  return shum::generate_scenario(shum::ScenarioConfig::builtin(1, {n, n, n}, 1, 1), 0);
}

void BM_EhumFast(benchmark::State& state) {
  const auto data = draw(static_cast<std::size_t>(state.range(0)));
  const shum::Scores s = shum::project_scores(data, Eigen::Vector3d(1.0, 1.1, 1.2));
  for (auto _ : state) benchmark::DoNotOptimize(shum::ehum_fast(s));
}
BENCHMARK(BM_EhumFast)->Arg(20)->Arg(120)->Arg(1000)->Arg(10000);

void BM_EhumBruteForce(benchmark::State& state) {
  const auto data = draw(static_cast<std::size_t>(state.range(0)));
  const shum::Scores s = shum::project_scores(data, Eigen::Vector3d(1.0, 1.1, 1.2));
  for (auto _ : state) benchmark::DoNotOptimize(shum::ehum_bruteforce(s));
}
BENCHMARK(BM_EhumBruteForce)->Arg(20)->Arg(120);

void BM_ShumValue(benchmark::State& state) {
  const auto data = draw(static_cast<std::size_t>(state.range(0)));
  const auto spec = shum::SmoothingSpec::make(shum::KernelKind::Sigmoid, 0.07);
  const Eigen::Vector3d beta(1.0, 1.1, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(shum::shum_value(data, beta, spec));
}
BENCHMARK(BM_ShumValue)->Arg(60)->Arg(120)->Arg(500);

void BM_ShumValueAndGradient(benchmark::State& state) {
  const auto data = draw(static_cast<std::size_t>(state.range(0)));
  const auto spec = shum::SmoothingSpec::make(shum::KernelKind::NormalCdf, 0.07);
  const Eigen::Vector3d beta(1.0, 1.1, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(shum::shum_value_and_gradient(data, beta, spec, 0));
}
BENCHMARK(BM_ShumValueAndGradient)->Arg(60)->Arg(120)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
