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
#include "kickshape/montecarlo.hpp"

namespace kickshape::bench {
namespace {

void BM_Trial(benchmark::State& state) {
    const ParametricModel model = nems();
    const ImpulseOcp ocp = nems_ocp(model, 25.0);
    SimulationOptions opt;
    opt.control_stride = 10;
    const SimulationSetup setup = prepare_simulation(
        model, ControlProtocol::zeros(ocp.control_grid(), model.bounds()), ocp.problem(), opt);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_impulse(simulate_record(setup, seed++), setup));
}
BENCHMARK(BM_Trial)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kickshape::bench
