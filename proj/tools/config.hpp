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

#include <cstdint>
#include <optional>
#include <string>

#include "kickshape/impulse.hpp"
#include "kickshape/montecarlo.hpp"
#include "kickshape/ocp.hpp"
#include "kickshape/systems.hpp"

namespace kickshape::cli {

enum class SystemType { kNems, kParticle };

struct GridSettings {
    double periods_before_tp = 25.0;
    double periods_after_tp = 25.0;
    std::size_t steps_per_period = 200;
    std::size_t control_stride = 10;
};

struct SimulationSettings {
    std::size_t trials = 1000;
    std::uint64_t base_seed = 1;
    double alpha = 0.0;
};

struct OutputSettings {
    std::string directory = ".";
    bool emit_plots = false;
};

struct RunConfig {
    SystemType system = SystemType::kNems;
    NemsParams nems;
    ParticleParams particle;
    GridSettings grid;
    OcpConfig ocp;
    SimulationSettings simulation;
    OutputSettings output;

    /// One key=value line per resolved setting, fixed order.
    std::string canonical() const;

    /// FNV-1a (64 bit) of canonical(), as 16 hex digits.
    std::string hash() const;

    ParametricModel model() const;
    ImpulseProblem problem() const;
    TimeGrid control_grid() const;
    SimulationOptions simulation_options() const;
};

/// Parses an INI file. Throws Error(kConfig) on syntax errors, unknown
/// sections or keys and malformed values, and the usual validation errors
/// for out-of-range physical parameters.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace kickshape::cli
