// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emovec/analysis.hpp"
#include "emovec/backend.hpp"
#include "emovec/estimator.hpp"
#include "emovec/toy_backend.hpp"

namespace {

void BM_Softmax(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<double> logits(static_cast<std::size_t>(state.range(0)));
  for (auto& l : logits) l = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(emovec::softmax(logits));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Softmax)->Arg(256)->Arg(32000);

void BM_ToyEmotionVector(benchmark::State& state) {
  const auto dict = emovec::bundled_dictionary();
  const auto toy = emovec::toy_backend(7, 256, 2048);
  const emovec::Estimator est(dict, *toy);
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.score("The kettle broke after a week."));
  }
}
BENCHMARK(BM_ToyEmotionVector)->Unit(benchmark::kMillisecond);

void BM_Jacobi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows(20, std::vector<double>(n));
  for (auto& r : rows) {
    for (auto& x : r) x = u(rng);
  }
  const auto m = emovec::second_moment(rows, false);
  for (auto _ : state) benchmark::DoNotOptimize(emovec::eigensystem(m));
}
BENCHMARK(BM_Jacobi)->Arg(10)->Arg(271)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
