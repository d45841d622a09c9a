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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kickshape/impulse.hpp"
#include "kickshape/ocp.hpp"
#include "kickshape/riccati.hpp"
#include "kickshape/systems.hpp"

namespace kickshape {

struct SimulationOptions {
    /// Integration steps per control interval; must match the OCP setting so
    /// that records align with the covariance trajectories.
    std::size_t control_stride = 10;
    SteadyStateOptions steady_state;
    /// Workers for run_ensemble; 0 = hardware concurrency.
    unsigned threads = 0;
};

/// Exact one-step transition of the linear SDE on one control interval.
struct StepOperators {
    Matrix F;        // e^{A dt}
    Matrix F_inv;    // e^{-A dt}
    Matrix noise;    // symmetric root of the discretized process noise
    Matrix C_eff;    // sqrt(eta) C
    Matrix N;
};

/// Everything a trial needs that does not depend on the random draws:
/// discretized dynamics, filter covariances and the theoretical variance.
struct SimulationSetup {
    TimeGrid grid;
    std::size_t stride = 1;
    std::size_t impulse_node = 0;
    Vector direction;
    double alpha = 0.0;
    std::vector<StepOperators> ops;   // one per control interval
    CovarianceTrajectory forward;     // Sigma on grid
    CovarianceTrajectory backward;    // Pi on grid
    std::vector<Matrix> forward_gain;   // nodes 0..impulse_node-1
    std::vector<Matrix> backward_gain;  // nodes impulse_node..K-1, offset by impulse_node
    Matrix initial_root;              // root of the stationary state covariance
    double theoretical_variance = 0.0;
    std::vector<std::string> warnings;

    const StepOperators& at(std::size_t step) const { return ops[step / stride]; }
    Eigen::Index state_dim() const { return direction.size(); }
    Eigen::Index channels() const { return ops.front().C_eff.rows(); }
};

/// Throws kValidity when the model has cross-correlated noise (N != 0) or a
/// state dimension above 8, kAlignment when the protocol grid does not cover
/// [0, problem.horizon].
SimulationSetup prepare_simulation(const ParametricModel& model, const ControlProtocol& protocol,
                                   const ImpulseProblem& problem, const SimulationOptions& options = {});

struct MeasurementRecord {
    TimeGrid grid;
    Matrix increments;     // channels x steps; column k covers [t_k, t_{k+1}]
    std::uint64_t seed = 0;
    std::size_t impulse_node = 0;
    Vector state_at_impulse;  // true state just before the kick
};

/// Draws a trajectory and its measurement record. The kick is added at the
/// impulse node, before the increment starting there is measured.
MeasurementRecord simulate_record(const SimulationSetup& setup, std::uint64_t seed);

/// Filtered means at nodes 0..impulse_node, starting from zero.
std::vector<Vector> filter_forward(const MeasurementRecord& record, const SimulationSetup& setup);

/// Retrodicted means at nodes impulse_node..K (index 0 is the impulse node),
/// starting from zero at the final node.
std::vector<Vector> filter_backward(const MeasurementRecord& record, const SimulationSetup& setup);

struct TrialResult {
    std::uint64_t seed = 0;
    double alpha_hat = 0.0;
    Vector delta_r_hat;
    Vector r_fwd_tp;
    Vector r_back_tp;
    Vector state_tp;  // truth before the kick
};

TrialResult estimate_impulse(const MeasurementRecord& record, const SimulationSetup& setup);

struct EnsembleStats {
    std::size_t trials = 0;
    std::uint64_t base_seed = 0;
    double alpha = 0.0;
    double mean_error = 0.0;
    double var_error = 0.0;
    double theoretical_var = 0.0;
    double z_score = 0.0;
    std::vector<TrialResult> results;
};

/// Trial k uses seed base_seed + k. Requires trials >= 2; errors are rethrown
/// with the index of the failing trial.
EnsembleStats run_ensemble(const SimulationSetup& setup, std::size_t trials, std::uint64_t base_seed,
                           unsigned threads = 0);

EnsembleStats run_ensemble(const ParametricModel& model, const ControlProtocol& protocol,
                           const ImpulseProblem& problem, std::size_t trials, std::uint64_t base_seed,
                           const SimulationOptions& options = {});

}  // namespace kickshape
