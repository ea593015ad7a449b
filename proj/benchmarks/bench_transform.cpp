// Copyright 2026 The rocketgrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "rocketgrid/convolution.hpp"
#include "rocketgrid/data.hpp"
#include "rocketgrid/engine.hpp"
#include "rocketgrid/exact_sum.hpp"
#include "rocketgrid/kernelgen.hpp"
#include "rocketgrid/rng.hpp"

using namespace rocketgrid;

namespace {

std::uint64_t dot_products(const Dataset& ds, const KernelBank& bank) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const KernelView kv = bank.kernel(k);
    total += output_length(bank.l_series(), kv.length, kv.dilation, kv.padding);
  }
  return total * ds.n_instances();
}

// Args: n_instances, l_series, n_kernels, workers_per_cell.
void BM_Engine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto l = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  const Dataset ds = synth_random(n, 1, l, 1);
  GenOptions gen;
  gen.seed = 2;
  const KernelBank bank = generate_bank(l, 1, k, gen);
  EngineOptions opt;
  opt.limits.workers_per_cell = static_cast<std::size_t>(state.range(3));
  for (auto _ : state) benchmark::DoNotOptimize(transform(ds, bank, opt));
  state.counters["dots/s"] = benchmark::Counter(static_cast<double>(dot_products(ds, bank)),
                                                benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Engine)
    ->Args({50, 500, 250, 1024})
    ->Args({100, 500, 250, 1024})
    ->Args({50, 1000, 250, 1024})
    ->Args({50, 500, 500, 1024})
    ->Args({50, 500, 250, 1})
    ->Args({50, 500, 250, 32})
    ->Unit(benchmark::kMillisecond);

void BM_EngineMpv(benchmark::State& state) {
  const Dataset ds = synth_random(50, 1, 500, 1);
  GenOptions gen;
  gen.seed = 2;
  const KernelBank bank = generate_bank(500, 1, 250, gen);
  EngineOptions opt;
  opt.include_mpv = true;
  opt.precision = state.range(0) == 1 ? Precision::kSingle : Precision::kDouble;
  for (auto _ : state) benchmark::DoNotOptimize(transform(ds, bank, opt));
}
BENCHMARK(BM_EngineMpv)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Reference(benchmark::State& state) {
  const Dataset ds = synth_random(50, 1, 500, 1);
  GenOptions gen;
  gen.seed = 2;
  const KernelBank bank = generate_bank(500, 1, 250, gen);
  for (auto _ : state) benchmark::DoNotOptimize(transform_reference(ds, bank, false, Precision::kSingle));
  state.counters["dots/s"] = benchmark::Counter(static_cast<double>(dot_products(ds, bank)),
                                                benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Reference)->Unit(benchmark::kMillisecond);

void BM_Sharded(benchmark::State& state) {
  const Dataset ds = synth_random(64, 1, 500, 1);
  GenOptions gen;
  gen.seed = 2;
  const KernelBank bank = generate_bank(500, 1, 250, gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transform_sharded(ds, bank, static_cast<std::size_t>(state.range(0)), {}));
  }
}
BENCHMARK(BM_Sharded)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_GenerateBank(benchmark::State& state) {
  GenOptions gen;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_bank(1000, static_cast<std::size_t>(state.range(0)), 10000, gen));
    ++gen.seed;
  }
}
BENCHMARK(BM_GenerateBank)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExactSumAdd(benchmark::State& state) {
  SplitMix64 rng(9);
  std::vector<double> values(4096);
  for (double& v : values) v = rng.uniform01() * 10.0;
  for (auto _ : state) {
    ExactSum s;
    for (const double v : values) s.add(v);
    benchmark::DoNotOptimize(s.value());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_ExactSumAdd);

}  // namespace

BENCHMARK_MAIN();
