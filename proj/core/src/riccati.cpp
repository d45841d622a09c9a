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


#include "kickshape/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "kickshape/error.hpp"

namespace kickshape {

TimeGrid::TimeGrid(double t0, double t1, std::size_t steps) : t0_(t0), t1_(t1), steps_(steps) {
    if (!(std::isfinite(t0) && std::isfinite(t1)) || !(t1 > t0)) {
        throw Error(ErrorCode::kRange, "time grid needs t1 > t0");
    }
    if (steps == 0) throw Error(ErrorCode::kRange, "time grid needs at least one step");
}

double TimeGrid::time(std::size_t node) const {
    if (node == steps_) return t1_;
    return t0_ + static_cast<double>(node) * dt();
}

std::size_t TimeGrid::nearest_node(double t) const {
    const double x = std::round((t - t0_) / dt());
    if (x <= 0.0) return 0;
    if (x >= static_cast<double>(steps_)) return steps_;
    return static_cast<std::size_t>(x);
}

TimeGrid TimeGrid::slice(std::size_t first, std::size_t last) const {
    if (first >= last || last > steps_) throw Error(ErrorCode::kRange, "invalid grid slice");
    return TimeGrid(time(first), time(last), last - first);
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
    if (factor == 0) throw Error(ErrorCode::kRange, "refinement factor must be positive");
    return TimeGrid(t0_, t1_, steps_ * factor);
}

namespace {

// Riccati right-hand side with compile-time dimensions. D = state dimension,
// M = number of channels; Eigen::Dynamic for the general path.
template <int D, int M>
struct Kernel {
    using Mat = Eigen::Matrix<double, D, D>;
    using CMat = Eigen::Matrix<double, M, D>;
    using GMat = Eigen::Matrix<double, D, M>;
    using EMat = Eigen::Matrix<double, M, M>;

    Mat A;
    CMat C;
    Mat Q;
    CMat N;
    EMat eta;

    explicit Kernel(const SystemMatrices& m) : A(m.A), C(m.C), Q(m.Q), N(m.N), eta(m.eta) {}

    Mat operator()(Flow flow, const Mat& S) const {
        Mat r;
        if (flow == Flow::kForward) {
            const GMat g = S * C.transpose() - N.transpose();
            r = A * S + S * A.transpose() + Q - g * eta * g.transpose();
        } else {
            const GMat g = S * C.transpose() + N.transpose();
            r = -A * S - S * A.transpose() + Q - g * eta * g.transpose();
        }
        return 0.5 * (r + r.transpose());
    }
};

template <class K, class Mat>
Mat rk4_step(const K& f, Flow flow, const Mat& S, const Mat& k1, double h) {
    const Mat k2 = f(flow, S + (0.5 * h) * k1);
    const Mat k3 = f(flow, S + (0.5 * h) * k2);
    const Mat k4 = f(flow, S + h * k3);
    const Mat next = S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return 0.5 * (next + next.transpose());
}

template <class Mat>
void enforce_psd(Mat& S, double psd_tol, std::size_t step) {
    if (!S.allFinite()) throw IntegrationDiverged(step, "non-finite covariance");
    Eigen::LLT<Mat> llt(S);
    if (llt.info() == Eigen::Success) return;
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    auto ev = es.eigenvalues().eval();
    const double lowest = ev.minCoeff();
    if (lowest >= 0.0) return;
    const double threshold = psd_tol * std::abs(S.trace()) / static_cast<double>(S.rows());
    if (lowest < -threshold) {
        throw IntegrationDiverged(step, "covariance left the PSD cone (min eigenvalue " +
                                            std::to_string(lowest) + ")");
    }
    ev = ev.cwiseMax(0.0);
    const Mat v = es.eigenvectors();
    S = v * ev.asDiagonal() * v.transpose();
    S = (0.5 * (S + S.transpose())).eval();
}

void check_shapes(const SystemMatrices& m, Eigen::Index dim) {
    if (m.A.rows() != dim || m.A.cols() != dim || m.Q.rows() != dim || m.Q.cols() != dim ||
        m.C.cols() != dim || m.N.rows() != m.C.rows() || m.N.cols() != dim ||
        m.eta.rows() != m.C.rows() || m.eta.cols() != m.C.rows()) {
        throw Error(ErrorCode::kShape, "system matrices do not match the covariance dimension");
    }
}

template <int D, int M>
Matrix run(Flow flow, const Matrix& init, const ModelSchedule& schedule, double h,
           std::size_t first, std::size_t last, double psd_tol, std::vector<Matrix>* store) {
    using K = Kernel<D, M>;
    using Mat = typename K::Mat;
    Mat S = init;
    const SystemMatrices* current = nullptr;
    std::optional<K> kernel;
    auto advance = [&](std::size_t step) {
        const SystemMatrices& m = schedule(step);
        if (&m != current) {
            check_shapes(m, init.rows());
            if (current != nullptr && m.C.rows() != current->C.rows()) {
                throw Error(ErrorCode::kShape, "channel count changes along the schedule");
            }
            kernel.emplace(m);
            current = &m;
        }
        const Mat k1 = (*kernel)(flow, S);
        S = rk4_step(*kernel, flow, S, k1, h);
        enforce_psd(S, psd_tol, step);
    };
    if (flow == Flow::kForward) {
        for (std::size_t step = first; step < last; ++step) {
            advance(step);
            if (store) (*store)[step + 1] = S;
        }
    } else {
        for (std::size_t step = last; step-- > first;) {
            advance(step);
            if (store) (*store)[step] = S;
        }
    }
    return S;
}

Matrix dispatch(Flow flow, const Matrix& init, const ModelSchedule& schedule, const TimeGrid& grid,
                std::size_t first, std::size_t last, double psd_tol, std::vector<Matrix>* store) {
    if (init.rows() != init.cols() || init.rows() == 0) {
        throw Error(ErrorCode::kShape, "initial covariance must be square");
    }
    if (!is_symmetric(init, 1e-9)) throw Error(ErrorCode::kValidity, "initial covariance is not symmetric");
    if (first > last || last > grid.steps()) throw Error(ErrorCode::kRange, "step range outside grid");
    if (first == last) return init;
    const SystemMatrices& probe = schedule(flow == Flow::kForward ? first : last - 1);
    check_shapes(probe, init.rows());
    const Matrix start = symmetrized(init);
    const double h = grid.dt();
    if (init.rows() == 2 && probe.C.rows() == 1) {
        return run<2, 1>(flow, start, schedule, h, first, last, psd_tol, store);
    }
    return run<Eigen::Dynamic, Eigen::Dynamic>(flow, start, schedule, h, first, last, psd_tol, store);
}

}  // namespace

Matrix rhs_forward(const Matrix& S, const SystemMatrices& m) {
    check_shapes(m, S.rows());
    if (S.rows() != S.cols()) throw Error(ErrorCode::kShape, "covariance must be square");
    return Kernel<Eigen::Dynamic, Eigen::Dynamic>(m)(Flow::kForward, S);
}

Matrix rhs_backward(const Matrix& P, const SystemMatrices& m) {
    check_shapes(m, P.rows());
    if (P.rows() != P.cols()) throw Error(ErrorCode::kShape, "covariance must be square");
    return Kernel<Eigen::Dynamic, Eigen::Dynamic>(m)(Flow::kBackward, P);
}

Matrix rhs(Flow flow, const Matrix& S, const SystemMatrices& m) {
    return flow == Flow::kForward ? rhs_forward(S, m) : rhs_backward(S, m);
}

CovarianceTrajectory integrate(Flow flow, const Matrix& init, const ModelSchedule& schedule,
                               const TimeGrid& grid, double psd_tol) {
    CovarianceTrajectory traj;
    traj.grid = grid;
    traj.values.assign(grid.steps() + 1, Matrix());
    const std::size_t start = flow == Flow::kForward ? 0 : grid.steps();
    traj.values[start] = symmetrized(init);
    dispatch(flow, init, schedule, grid, 0, grid.steps(), psd_tol, &traj.values);
    return traj;
}

Matrix propagate(Flow flow, const Matrix& init, const ModelSchedule& schedule, const TimeGrid& grid,
                 std::size_t first, std::size_t last, double psd_tol) {
    return dispatch(flow, init, schedule, grid, first, last, psd_tol, nullptr);
}

double steady_state_rate_scale(const SystemMatrices& m, const SteadyStateOptions& options) {
    if (options.rate_scale > 0.0) return options.rate_scale;
    return std::max(1.0, m.A.norm());
}

namespace {

double default_budget(const SystemMatrices& m, double rate_scale) {
    Eigen::EigenSolver<Matrix> es(m.A, false);
    double slowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        slowest = std::min(slowest, std::abs(es.eigenvalues()[i].real()));
    }
    if (!(slowest > 1e-12 * rate_scale)) return 1e6 / rate_scale;
    return 20.0 / slowest;
}

template <int D, int M>
Matrix settle(Flow flow, const SystemMatrices& m, const Matrix& S0, double tol, double max_time,
              double rate_scale) {
    using K = Kernel<D, M>;
    using Mat = typename K::Mat;
    const K f(m);
    const double a_norm = m.A.norm();
    const double gain_norm = (m.C.transpose() * m.eta * m.C).norm();
    const double cross_norm = (m.N.transpose() * m.eta * m.C).norm();
    Mat S = S0;
    double t = 0.0;
    double h = 0.0;
    for (std::size_t step = 0;; ++step) {
        if (step % 64 == 0) {
            // Linearized stiffness of the flow around S; 0.1 keeps RK4 well
            // inside its stability region.
            const double stiffness = 2.0 * (a_norm + S.norm() * gain_norm + cross_norm);
            h = stiffness > 0.0 ? 0.1 / stiffness : max_time * 1e-4;
        }
        const Mat k1 = f(flow, S);
        if (!k1.allFinite()) throw IntegrationDiverged(step, "non-finite steady-state derivative");
        if (k1.norm() / rate_scale < tol * (1.0 + S.norm())) return S;
        if (t >= max_time) {
            throw Error(ErrorCode::kNoSteadyState,
                        "Riccati flow did not settle within " + std::to_string(max_time) + " s");
        }
        S = rk4_step(f, flow, S, k1, h);
        enforce_psd(S, kDefaultPsdTol, step);
        t += h;
    }
}

}  // namespace

Matrix steady_state(Flow flow, const SystemMatrices& m, const Matrix& S0,
                    const SteadyStateOptions& options) {
    m.validate();
    check_shapes(m, S0.rows());
    if (S0.rows() != S0.cols()) throw Error(ErrorCode::kShape, "initial covariance must be square");
    if (!is_symmetric(S0, 1e-9)) throw Error(ErrorCode::kValidity, "initial covariance is not symmetric");
    if (!(options.tol > 0.0)) throw Error(ErrorCode::kRange, "steady-state tolerance must be positive");
    const double nu = steady_state_rate_scale(m, options);
    const double budget = options.max_time > 0.0 ? options.max_time : default_budget(m, nu);
    const Matrix start = symmetrized(S0);
    if (S0.rows() == 2 && m.C.rows() == 1) return settle<2, 1>(flow, m, start, options.tol, budget, nu);
    return settle<Eigen::Dynamic, Eigen::Dynamic>(flow, m, start, options.tol, budget, nu);
}

}  // namespace kickshape
