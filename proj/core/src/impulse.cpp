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


#include "kickshape/impulse.hpp"

#include <algorithm>
#include <cmath>

#include "kickshape/error.hpp"

namespace kickshape {

namespace {

void require_unit(const Vector& n) {
    if (n.size() == 0 || !(std::abs(n.norm() - 1.0) <= 1e-12)) {
        throw Error(ErrorCode::kNormalization, "impulse direction must be a unit vector");
    }
}

}  // namespace

void ImpulseProblem::validate() const {
    if (!(t_p > 0.0 && t_p < horizon)) throw Error(ErrorCode::kRange, "impulse time must satisfy 0 < t_p < T");
    require_unit(direction);
}

ImpulseProblem ImpulseProblem::momentum_kick(double t_p, double horizon, double alpha) {
    ImpulseProblem problem;
    problem.t_p = t_p;
    problem.horizon = horizon;
    problem.direction = Vector::Zero(2);
    problem.direction[1] = 1.0;
    problem.alpha = alpha;
    return problem;
}

Matrix combined_covariance(const Matrix& forward, const Matrix& backward) {
    if (forward.rows() != backward.rows() || forward.cols() != backward.cols() ||
        forward.rows() != forward.cols()) {
        throw Error(ErrorCode::kShape, "forward and backward covariances differ in shape");
    }
    return symmetrized(forward + backward);
}

double projected_variance(const Matrix& S, const Vector& n) {
    require_unit(n);
    if (S.rows() != n.size() || S.cols() != n.size()) {
        throw Error(ErrorCode::kShape, "direction does not match covariance");
    }
    return std::max(0.0, n.dot(S * n));
}

std::vector<TracePoint> uncertainty_timetrace(const CovarianceTrajectory& forward,
                                              const CovarianceTrajectory& backward, const Vector& n) {
    if (!(forward.grid == backward.grid) || forward.values.size() != backward.values.size()) {
        throw Error(ErrorCode::kAlignment, "forward and backward trajectories use different grids");
    }
    std::vector<TracePoint> trace;
    trace.reserve(forward.values.size());
    for (std::size_t k = 0; k < forward.values.size(); ++k) {
        const double v = projected_variance(combined_covariance(forward.values[k], backward.values[k]), n);
        trace.push_back({forward.grid.time(k), std::sqrt(v)});
    }
    return trace;
}

}  // namespace kickshape
