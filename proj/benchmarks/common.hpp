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


#pragma once

#include <numbers>

#include "kickshape/ocp.hpp"
#include "kickshape/systems.hpp"

namespace kickshape::bench {

inline ParametricModel nems() {
    NemsParams p;
    p.omega0 = 2.0 * std::numbers::pi * 33.7e3;
    p.gamma = 2.07;
    p.mass = 2.8e-12;
    p.temperature = 295.0;
    p.force_psd = 5.3e-31;
    p.measurement_psd = 4e-28;
    return nems_model(p);
}

// periods before and after the kick, 200 steps per period, stride 10.
inline ImpulseOcp nems_ocp(const ParametricModel& model, double periods, unsigned threads = 1) {
    const double period = model.reference_period();
    const auto problem = ImpulseProblem::momentum_kick(periods * period, 2 * periods * period, 5.0);
    OcpConfig cfg;
    cfg.threads = threads;
    return ImpulseOcp(model, problem, make_control_grid(model, problem, 200, 10), cfg);
}

}  // namespace kickshape::bench
