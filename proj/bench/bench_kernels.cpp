// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

// Kernel timings: textbook reference vs. blocked serial vs. OpenMP.
//   ./bench_kernels --benchmark_filter=Dense

#include <benchmark/benchmark.h>

#include "phasemem/kernels.hpp"
#include "phasemem/model.hpp"
#include "phasemem/spectral.hpp"

#include <random>

namespace {

using namespace phasemem;

DenseMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  return a;
}

void BM_DenseReference(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::tred2_tql2(a));
}

void BM_DenseSerial(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::tridiagonal_ql(a, kernels::Exec::Serial));
}

void BM_DenseParallel(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::tridiagonal_ql(a, kernels::Exec::Parallel));
}

ModelConfig model(int n) {
  ModelConfig c;
  c.n = n;
  c.j_bound = 0.48;
  return c;
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const auto cfg = model(static_cast<int>(state.range(0)));
  const auto draw = draw_couplings(cfg, 0);
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(draw, cfg));
}

void BM_ModelDiagonalize(benchmark::State& state) {
  const auto cfg = model(static_cast<int>(state.range(0)));
  const auto h = build_hamiltonian(draw_couplings(cfg, 0), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h));
}

}  // namespace

BENCHMARK(BM_DenseReference)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSerial)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseParallel)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildHamiltonian)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModelDiagonalize)->DenseRange(8, 10, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
