// Copyright 2026 The kickshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "common.hpp"

namespace kickshape::bench {
namespace {

void BM_EvaluateCost(benchmark::State& state) {
    const ParametricModel model = nems();
    const ImpulseOcp ocp = nems_ocp(model, static_cast<double>(state.range(0)));
    const std::vector<double> u(ocp.control_grid().steps(), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(ocp.evaluate(u));
}
BENCHMARK(BM_EvaluateCost)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
    const ParametricModel model = nems();
    const ImpulseOcp ocp = nems_ocp(model, 5.0);
    const std::vector<double> u(ocp.control_grid().steps(), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(ocp.gradient(u));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * u.size()));
}
BENCHMARK(BM_Gradient)->Unit(benchmark::kMillisecond);

void BM_DenseGradient(benchmark::State& state) {
    const ParametricModel model = nems();
    const ImpulseOcp ocp = nems_ocp(model, 5.0);
    const std::vector<double> u(ocp.control_grid().steps(), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(ocp.dense_gradient(u));
}
BENCHMARK(BM_DenseGradient)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kickshape::bench
