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
#include <vector>

#include "kickshape/gaussian_model.hpp"
#include "kickshape/linalg.hpp"

namespace kickshape {

/// Direction of a Riccati flow. Backward flows are parametrized by reversed
/// time tau = T - t.
enum class Flow { kForward, kBackward };

/// Uniform grid on [t0, t1] with `steps` intervals (steps + 1 nodes).
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double t0, double t1, std::size_t steps);

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return (t1_ - t0_) / static_cast<double>(steps_); }
    double time(std::size_t node) const;

    std::size_t nearest_node(double t) const;

    /// Sub-grid covering nodes [first, last] of this grid.
    TimeGrid slice(std::size_t first, std::size_t last) const;

    /// Same span with every interval split into `factor` intervals.
    TimeGrid refined(std::size_t factor) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t0_ = 0.0;
    double t1_ = 1.0;
    std::size_t steps_ = 1;
};

/// Covariances at every node of a grid, indexed in forward time for both flows
/// (values[k] belongs to grid.time(k)).
struct CovarianceTrajectory {
    TimeGrid grid;
    std::vector<Matrix> values;
};

/// Model matrices in effect on grid interval `step` (held constant over it).
using ModelSchedule = std::function<const SystemMatrices&(std::size_t step)>;

Matrix rhs_forward(const Matrix& S, const SystemMatrices& m);

/// Derivative with respect to reversed time tau.
Matrix rhs_backward(const Matrix& P, const SystemMatrices& m);

Matrix rhs(Flow flow, const Matrix& S, const SystemMatrices& m);

/// Classic RK4 over the whole grid. For kForward `init` sits at grid.t0();
/// for kBackward it is the terminal value at grid.t1() and the recursion runs
/// from the last interval to the first. Throws IntegrationDiverged on
/// non-finite values or a PSD violation beyond `psd_tol` (relative to
/// trace/dim); smaller negative eigenvalues are clipped to zero.
CovarianceTrajectory integrate(Flow flow, const Matrix& init, const ModelSchedule& schedule,
                               const TimeGrid& grid, double psd_tol = kDefaultPsdTol);

/// Same recursion as integrate() restricted to intervals [first, last) of the
/// grid, returning only the end value. Steps are numbered in forward time, so
/// a backward propagation starts at node `last` and ends at node `first`.
/// Bit-identical to the matching values of a full integrate() call.
Matrix propagate(Flow flow, const Matrix& init, const ModelSchedule& schedule,
                 const TimeGrid& grid, std::size_t first, std::size_t last,
                 double psd_tol = kDefaultPsdTol);

struct SteadyStateOptions {
    double tol = 1e-10;
    /// Integration budget in seconds; <= 0 selects 20 / (slowest decay rate
    /// of A), or 1e6 / rate_scale when A has no decaying mode.
    double max_time = 0.0;
    /// Rate used to express the RHS per unit of rescaled time; <= 0 selects
    /// max(1, ||A||_F).
    double rate_scale = 0.0;
};

/// Integrates the autonomous flow until ||rhs|| / rate_scale <
/// tol * (1 + ||S||), all Frobenius norms. Throws kNoSteadyState when the
/// budget runs out.
Matrix steady_state(Flow flow, const SystemMatrices& m, const Matrix& S0,
                    const SteadyStateOptions& options = {});

/// The rate scale steady_state() uses for `m` under `options`.
double steady_state_rate_scale(const SystemMatrices& m, const SteadyStateOptions& options = {});

}  // namespace kickshape
