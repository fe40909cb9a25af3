// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "kchain/descent.hpp"
#include "kchain/linalg.hpp"
#include "kchain/syntomic.hpp"

using namespace kchain;

namespace {

void BM_KGroupsZ4(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kgroups(2, 1, 2, i));
  state.SetLabel("Z/2^2");
}
BENCHMARK(BM_KGroupsZ4)->DenseRange(2, 12, 2)->Unit(benchmark::kMillisecond);

void BM_KGroupsZ9(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kgroups(3, 1, 2, i));
  state.SetLabel("Z/3^2");
}
BENCHMARK(BM_KGroupsZ9)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_DescentContext(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const PrecisionPlan plan = precision_plan(2, 1, 2, i);
  for (auto _ : state) {
    const WittRingPtr ring = make_ring(2, 1, plan.effective(), {});
    benchmark::DoNotOptimize(make_descent_context(ring, 2, eisenstein_for(*ring, {}), i));
  }
}
BENCHMARK(BM_DescentContext)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_NormalFormPowers(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const WittRingPtr ring = make_ring(2, 1, 40, {});
  const DescentContext ctx = make_descent_context(ring, 3, eisenstein_for(*ring, {}), i);
  for (auto _ : state)
    for (int k = 0; k <= ctx.B; ++k) benchmark::DoNotOptimize(ctx.quot->z_power(k));
}
BENCHMARK(BM_NormalFormPowers)->Arg(4)->Arg(8);

void BM_Smith(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long> d(-1000, 1000);
  PadicMatrix m(2, 64, n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m.at(r, c) = d(rng) * (r % 3 == 0 ? 4 : 1);
  m.normalize();
  for (auto _ : state) benchmark::DoNotOptimize(smith(m, true));
  state.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_Smith)->RangeMultiplier(2)->Range(8, 64)->Complexity();

}  // namespace

BENCHMARK_MAIN();
