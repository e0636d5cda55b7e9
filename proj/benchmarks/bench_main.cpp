// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <random>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "overflow/dct.hpp"
#include "overflow/probes/config.hpp"
#include "overflow/probes/logistic.hpp"
#include "overflow/probes/trainer.hpp"
#include "overflow/roc_auc.hpp"
#include "overflow/saturation.hpp"

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

void BM_Dct(benchmark::State& state) {
  const auto v = gaussian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(overflow::dct2(v));
}
BENCHMARK(BM_Dct)->Arg(256)->Arg(1024)->Arg(4096);

void BM_DctNaive(benchmark::State& state) {
  const auto v = gaussian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(overflow::dct2_naive(v));
}
BENCHMARK(BM_DctNaive)->Arg(256)->Arg(1024);

void BM_SaturationProfile(benchmark::State& state) {
  const auto v = gaussian(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(overflow::saturation_profile(v));
}
BENCHMARK(BM_SaturationProfile)->Arg(1024)->Arg(4096);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto s = gaussian(n, 3);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 5 == 0);
  for (auto _ : state) benchmark::DoNotOptimize(overflow::roc_auc(s, y));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

struct Problem {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Problem problem(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Problem p{Eigen::MatrixXd(n, d), std::vector<int>(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) p.x(i, j) = nd(rng);
    p.y[static_cast<std::size_t>(i)] = p.x(i, 0) + 0.5 * nd(rng) > 0;
  }
  return p;
}

void BM_TrainLogistic(benchmark::State& state) {
  const auto p = problem(state.range(0), 3);
  const auto cfg = overflow::ProbeConfig::defaults(overflow::Architecture::logistic);
  for (auto _ : state) benchmark::DoNotOptimize(overflow::train_logistic(p.x, p.y, cfg));
}
BENCHMARK(BM_TrainLogistic)->Arg(1000)->Arg(10000);

void BM_TrainProbe(benchmark::State& state) {
  const auto arch = static_cast<overflow::Architecture>(state.range(0));
  const auto p = problem(500, 256);
  auto cfg = overflow::ProbeConfig::defaults(arch);
  cfg.max_epochs = 10;
  cfg.hidden_dim = 128;
  for (auto _ : state) benchmark::DoNotOptimize(overflow::train_probe(p.x, p.y, cfg));
  state.SetLabel(std::string(overflow::to_string(arch)));
}
BENCHMARK(BM_TrainProbe)
    ->Arg(static_cast<int>(overflow::Architecture::linear))
    ->Arg(static_cast<int>(overflow::Architecture::mlp))
    ->Arg(static_cast<int>(overflow::Architecture::mlp_scl))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
