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

#include <vector>

#include "kickshape/linalg.hpp"
#include "kickshape/riccati.hpp"

namespace kickshape {

/// A kick of magnitude `alpha` along the unit vector `direction` at the known
/// time `t_p`, observed on [0, horizon].
struct ImpulseProblem {
    double t_p = 0.0;
    double horizon = 0.0;
    Vector direction;
    double alpha = 0.0;

    /// Throws kRange unless 0 < t_p < horizon, kNormalization unless
    /// |direction| = 1 within 1e-12.
    void validate() const;

    /// Momentum kick n = (0, 1) for a single mode.
    static ImpulseProblem momentum_kick(double t_p, double horizon, double alpha = 0.0);
};

/// Error covariance of the impulse estimate: forward plus backward covariance.
Matrix combined_covariance(const Matrix& forward, const Matrix& backward);

/// n^T S n for a unit vector n.
double projected_variance(const Matrix& S, const Vector& n);

struct TracePoint {
    double t = 0.0;
    double value = 0.0;
};

/// sqrt(n^T (Sigma(t) + Pi(t)) n) at every node of a shared grid.
std::vector<TracePoint> uncertainty_timetrace(const CovarianceTrajectory& forward,
                                              const CovarianceTrajectory& backward, const Vector& n);

}  // namespace kickshape
