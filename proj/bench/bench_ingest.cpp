// Copyright 2026 The usketch Authors
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

// Serial reference against the OpenMP kernels on the same input.

#include <benchmark/benchmark.h>

#include "usketch/core.hpp"
#include "usketch/streamgen.hpp"
#include "usketch/universal_sum.hpp"

using namespace usketch;

namespace {

const Stream& stream() {
  static const Stream s = [] {
    RandomStreamSpec spec;
    spec.universe = 256;
    spec.length = 20000;
    spec.distribution = Distribution::kZipf;
    spec.seed = 1;
    return random_stream(spec);
  }();
  return s;
}

Execution mode(const benchmark::State& state) {
  return state.range(0) ? Execution::kParallel : Execution::kSerial;
}

void BM_CoreIngest(benchmark::State& state) {
  CoreConfig c;
  c.alpha = 4.0;
  c.profile = Profile::relaxed(c.universe, c.window);
  for (auto _ : state) {
    UniversalCore core(c);
    core.ingest_batch(stream(), mode(state));
    benchmark::DoNotOptimize(core.absorbed());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream().size()));
}

void BM_SumIngest(benchmark::State& state) {
  SumConfig c;
  c.profile = Profile::relaxed(c.universe, c.window);
  for (auto _ : state) {
    UniversalSum sum(c);
    sum.ingest_batch(stream(), mode(state));
    benchmark::DoNotOptimize(sum.absorbed());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream().size()));
}

void BM_BuildReplicas(benchmark::State& state) {
  SumConfig c;
  c.profile = Profile::relaxed(c.universe, c.window);
  for (auto _ : state) {
    auto file = build_structure(stream(), c, 3, {}, mode(state));
    benchmark::DoNotOptimize(file.replicas.size());
  }
}

}  // namespace

BENCHMARK(BM_CoreIngest)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SumIngest)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildReplicas)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
