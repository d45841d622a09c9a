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
#include "kickshape/riccati.hpp"

namespace kickshape::bench {
namespace {

void BM_RhsForward(benchmark::State& state) {
    const SystemMatrices m = nems().evaluate(0.1);
    Matrix s = Matrix::Identity(2, 2) * 1e4;
    for (auto _ : state) benchmark::DoNotOptimize(rhs_forward(s, m));
}
BENCHMARK(BM_RhsForward);

void BM_IntegratePeriods(benchmark::State& state) {
    const ParametricModel model = nems();
    const SystemMatrices m = model.evaluate(0.0);
    const double periods = static_cast<double>(state.range(0));
    const std::size_t steps = static_cast<std::size_t>(state.range(0)) * 200;
    const TimeGrid g(0.0, periods * model.reference_period(), steps);
    const Matrix init = Matrix::Identity(2, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            propagate(Flow::kForward, init, [&](std::size_t) -> const SystemMatrices& { return m; }, g, 0, steps));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * steps));
}
BENCHMARK(BM_IntegratePeriods)->Arg(1)->Arg(25);

void BM_SteadyState(benchmark::State& state) {
    const SystemMatrices m = nems().evaluate(0.0);
    for (auto _ : state) benchmark::DoNotOptimize(steady_state(Flow::kForward, m, Matrix::Identity(2, 2)));
}
BENCHMARK(BM_SteadyState)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kickshape::bench
BENCHMARK_MAIN();
