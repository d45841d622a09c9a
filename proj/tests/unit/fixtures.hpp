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

#include <cmath>
#include <numbers>

#include "kickshape/impulse.hpp"
#include "kickshape/ocp.hpp"
#include "kickshape/systems.hpp"

namespace kickshape::testing {

inline SystemMatrices scalar_system(double a, double c, double q, double eta = 1.0, double n = 0.0) {
    SystemMatrices m;
    m.A = Matrix::Constant(1, 1, a);
    m.C = Matrix::Constant(1, 1, c);
    m.Q = Matrix::Constant(1, 1, q);
    m.N = Matrix::Constant(1, 1, n);
    m.eta = Matrix::Constant(1, 1, eta);
    return m;
}

inline NemsParams nems_params() {
    NemsParams p;
    p.omega0 = 2.0 * std::numbers::pi * 33.7e3;
    p.gamma = 2.07;
    p.mass = 2.8e-12;
    p.temperature = 295.0;
    p.force_psd = 5.3e-31;
    p.measurement_psd = 4e-28;
    return p;
}

inline ParticleParams particle_params() {
    ParticleParams p;
    p.omega0 = 2.0 * std::numbers::pi * 104e3;
    p.gamma = 0.64;
    p.kappa0 = 41e3;
    p.eta_hom = 0.4;
    p.mass = 4.5e-18;
    return p;
}

/// Scalar toy whose drift and noise both depend on p, giving interior optima
/// for both legs: a = -(1 + p), q = 1 + 10 p^2, c = 1.
inline ParametricModel scalar_toy() {
    return ParametricModel(
        "toy",
        [](double p) { return scalar_system(-(1.0 + p), 1.0, 1.0 + 10.0 * p * p); },
        Bounds{}, 2.0 * std::numbers::pi, 1.0);
}

/// Closed-form steady states of the toy (positive roots of the scalar
/// Riccati quadratics).
inline double toy_forward_ss(double p) {
    const double a = -(1.0 + p);
    return a + std::sqrt(a * a + 1.0 + 10.0 * p * p);
}
inline double toy_backward_ss(double p) {
    const double a = -(1.0 + p);
    return -a + std::sqrt(a * a + 1.0 + 10.0 * p * p);
}

inline ImpulseProblem scalar_problem(double t_p, double horizon) {
    ImpulseProblem problem;
    problem.t_p = t_p;
    problem.horizon = horizon;
    problem.direction = Vector::Ones(1);
    return problem;
}

/// NEMS on a coarse, short horizon for fast optimizer tests.
struct SmallNems {
    ParametricModel model = nems_model(nems_params());
    ImpulseProblem problem;
    TimeGrid grid;
    OcpConfig config;

    SmallNems(double periods = 4.0, std::size_t steps_per_period = 40, std::size_t stride = 4) {
        const double period = model.reference_period();
        problem = ImpulseProblem::momentum_kick(periods * period, 2.0 * periods * period);
        config.control_stride = stride;
        config.threads = 1;
        grid = make_control_grid(model, problem, steps_per_period, stride);
    }
};

}  // namespace kickshape::testing
