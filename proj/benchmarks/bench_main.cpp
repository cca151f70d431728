#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bcpace/classifier.hpp"
#include "bcpace/gain.hpp"
#include "bcpace/matrix.hpp"
#include "bcpace/normal_form.hpp"
#include "bcpace/pacing.hpp"
#include "bcpace/sun_model.hpp"

namespace {

using namespace bcpace;

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = normal(rng);
  return m;
}

const NormalFormMap& golden() {
  static const NormalFormMap map(Matrix{{0.5}}, Matrix{{-1.5}}, Vector{1.0});
  return map;
}

// 3-D map with B - A in the first column only.
const NormalFormMap& three_d() {
  static const NormalFormMap map(Matrix{{0.4, 0.1, 0.0}, {0.2, 0.3, 0.1}, {0.0, 0.1, 0.2}},
                                 Matrix{{-1.6, 0.1, 0.0}, {0.5, 0.3, 0.1}, {0.3, 0.1, 0.2}}, Vector{1.0, 0.2, 0.1});
  return map;
}

void BM_Eigenvalues(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(m));
}
BENCHMARK(BM_Eigenvalues)->Arg(2)->Arg(3)->Arg(8)->Arg(16);

void BM_CheckConditions(benchmark::State& state) {
  const bool certificate = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(check_conditions(three_d(), certificate));
}
BENCHMARK(BM_CheckConditions)->Arg(0)->Arg(1);

void BM_SimulatePaced(benchmark::State& state) {
  SimulationOptions opts;
  opts.transient = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_paced(golden(), 0.1, 1.0, Vector{0.0}, opts));
}
BENCHMARK(BM_SimulatePaced)->Arg(200)->Arg(2000);

void BM_GainScan(benchmark::State& state) {
  const auto grid = linear_grid(0.05, 2.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gain_scan(three_d(), ScanAxis::delta, 0.3, grid));
}
BENCHMARK(BM_GainScan)->Arg(20)->Arg(200)->UseRealTime();

void BM_SunBifurcation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_H_bif());
}
BENCHMARK(BM_SunBifurcation);

void BM_SunGainExperiment(benchmark::State& state) {
  static const SunCaseStudy study;
  const double h = study.bifurcation().h_bif + 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(study.gain_experiment(h, 1.0));
}
BENCHMARK(BM_SunGainExperiment);

void BM_Classify(benchmark::State& state) {
  std::vector<GainObservation> samples;
  for (int k = 0; k < 8; ++k) {
    const double delta = 0.1 * std::pow(20.0, k / 7.0);
    samples.push_back({delta, gain_theory_bc(golden(), 0.1, delta) * (1.0 + 0.01 * ((k % 3) - 1))});
  }
  for (auto _ : state) benchmark::DoNotOptimize(classify_bifurcation(samples));
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
