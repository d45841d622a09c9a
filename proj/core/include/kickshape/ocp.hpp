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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "kickshape/impulse.hpp"
#include "kickshape/riccati.hpp"
#include "kickshape/systems.hpp"

namespace kickshape {

/// Piecewise-constant modulation: values[k] holds on control interval k of
/// `grid`.
struct ControlProtocol {
    TimeGrid grid;
    std::vector<double> values;
    Bounds bounds;

    /// Throws kShape on a size mismatch and kAdmissibility when a value lies
    /// outside the bounds.
    void validate() const;

    static ControlProtocol zeros(const TimeGrid& grid, const Bounds& bounds);
};

struct OcpConfig {
    /// Weight of the L1 control penalty; unset selects default_gamma_reg().
    std::optional<double> gamma_reg;
    std::size_t max_iters = 200;
    /// Stop when ||u - clamp(u - grad)|| < grad_tol * |initial cost|.
    double grad_tol = 1e-6;
    double fd_step = 1e-5;
    std::size_t control_stride = 10;
    double armijo_c1 = 1e-4;
    double backtrack_factor = 0.5;
    std::size_t max_backtracks = 40;
    /// Worker threads for gradient entries; 0 = hardware concurrency.
    unsigned threads = 0;
    SteadyStateOptions steady_state;

    void validate() const;
};

struct CostValue {
    double cost = 0.0;
    double projected_variance = 0.0;
};

struct OcpResult {
    ControlProtocol protocol;
    std::vector<double> cost_history;
    double final_cost = 0.0;
    double final_projected_variance = 0.0;
    double steady_state_projected_variance = 0.0;
    double ratio = 0.0;
    double gamma_reg = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool stalled = false;
};

/// gamma such that gamma * p_max * T equals 5% of the unmodulated projected
/// variance.
double default_gamma_reg(double baseline_variance, const Bounds& bounds, double horizon);

/// Forward and backward covariances over the whole horizon for one protocol.
struct CovarianceTraces {
    CovarianceTrajectory forward;
    CovarianceTrajectory backward;
};

/// Single-shooting transcription of the covariance-shaping problem on a fixed
/// control grid. The impulse time is snapped to the nearest control node.
/// Steady states at the boundary controls are memoized; all const members are
/// safe to call concurrently.
class ImpulseOcp {
public:
    ImpulseOcp(ParametricModel model, ImpulseProblem problem, TimeGrid control_grid, OcpConfig config);

    const ParametricModel& model() const { return model_; }
    const ImpulseProblem& problem() const { return problem_; }
    const OcpConfig& config() const { return config_; }
    const TimeGrid& control_grid() const { return control_grid_; }
    const TimeGrid& integration_grid() const { return integration_grid_; }
    std::size_t impulse_control_node() const { return impulse_control_node_; }
    std::size_t impulse_node() const { return impulse_control_node_ * config_.control_stride; }
    double gamma_reg() const { return gamma_reg_; }

    /// n^T (Sigma_ss + Pi_ss) n of the unmodulated system.
    double baseline_variance() const { return baseline_variance_; }

    Matrix forward_steady_state(double p) const;
    Matrix backward_steady_state(double p) const;

    /// Throws kInfeasibleProtocol when the Riccati flows diverge.
    CostValue evaluate(std::span<const double> controls) const;

    /// Central finite differences with step fd_step, probing only the leg a
    /// control influences and restarting from cached nominal covariances.
    std::vector<double> gradient(std::span<const double> controls) const;

    /// Same quantity recomputed from full cost evaluations (reference path).
    std::vector<double> dense_gradient(std::span<const double> controls) const;

    /// Projected gradient descent with Armijo backtracking.
    OcpResult optimize(const ControlProtocol& init) const;

    CovarianceTraces traces(std::span<const double> controls) const;

    /// Sigma(t_p) and Pi(t_p) for a protocol.
    std::pair<Matrix, Matrix> covariances_at_impulse(std::span<const double> controls) const;

    ControlProtocol make_protocol(std::vector<double> values) const;

private:
    struct Legs;

    std::vector<SystemMatrices> schedule_for(std::span<const double> controls) const;
    double regularization(std::span<const double> controls) const;
    Legs nominal_legs(std::span<const double> controls, const std::vector<SystemMatrices>& sched) const;
    double probe(std::span<const double> controls, const std::vector<SystemMatrices>& sched,
                 const Legs& legs, std::size_t index, double value) const;
    void check_controls(std::span<const double> controls) const;

    ParametricModel model_;
    ImpulseProblem problem_;
    TimeGrid control_grid_;
    TimeGrid integration_grid_;
    OcpConfig config_;
    std::size_t impulse_control_node_ = 0;
    Matrix seed_covariance_;
    double baseline_variance_ = 0.0;
    double gamma_reg_ = 0.0;

    mutable std::mutex cache_mutex_;
    mutable std::map<double, Matrix> forward_cache_;
    mutable std::map<double, Matrix> backward_cache_;
};

/// Control grid with `stride`-step intervals on the integration grid implied
/// by `steps_per_period` and the model's reference period, spanning
/// [0, problem.horizon].
TimeGrid make_control_grid(const ParametricModel& model, const ImpulseProblem& problem,
                           std::size_t steps_per_period, std::size_t stride);

CostValue evaluate_cost(const ControlProtocol& protocol, const ParametricModel& model,
                        const ImpulseProblem& problem, const OcpConfig& config);

std::vector<double> gradient(const ControlProtocol& protocol, const ParametricModel& model,
                             const ImpulseProblem& problem, const OcpConfig& config);

OcpResult optimize(const ParametricModel& model, const ImpulseProblem& problem, const OcpConfig& config,
                   const ControlProtocol& init);

/// Square wave of +-depth switching at `frequency` inside [window_start,
/// window_end], zero outside. `phase_rate` scales the phase velocity as a
/// function of the current level, so a level p advances the phase at
/// frequency * phase_rate(p); empty means uniform switching.
struct RectangularWave {
    double frequency = 0.0;
    double depth = 0.0;
    double phase = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::function<double(double)> phase_rate;
};

/// Samples the wave at control-interval midpoints.
ControlProtocol rectangular_protocol(const TimeGrid& grid, const RectangularWave& wave, const Bounds& bounds);

}  // namespace kickshape
