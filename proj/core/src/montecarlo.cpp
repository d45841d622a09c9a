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


#include "kickshape/montecarlo.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "kickshape/error.hpp"
#include "parallel.hpp"

namespace kickshape {

namespace {

constexpr int kMaxDim = 8;

// Heap-free temporaries for the per-step recursions.
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

// Exact discretization of dx = A x dt + dW_Q over one step: returns e^{A dt}
// and the covariance of the accumulated noise.
std::pair<Matrix, Matrix> discretize(const Matrix& A, const Matrix& Q, double dt) {
    const Eigen::Index d = A.rows();
    Matrix M = Matrix::Zero(2 * d, 2 * d);
    M.topLeftCorner(d, d) = -A * dt;
    M.topRightCorner(d, d) = Q * dt;
    M.bottomRightCorner(d, d) = A.transpose() * dt;
    const Matrix E = M.exp();
    Matrix F = E.bottomRightCorner(d, d).transpose();
    Matrix Qd = symmetrized(F * E.topRightCorner(d, d));
    return {std::move(F), std::move(Qd)};
}

void check_record(const MeasurementRecord& record, const SimulationSetup& setup) {
    if (!(record.grid == setup.grid) || record.increments.cols() != static_cast<Eigen::Index>(setup.grid.steps()) ||
        record.increments.rows() != setup.channels() || record.impulse_node != setup.impulse_node) {
        throw Error(ErrorCode::kAlignment, "measurement record does not match the simulation grid");
    }
}

}  // namespace

SimulationSetup prepare_simulation(const ParametricModel& model, const ControlProtocol& protocol,
                                   const ImpulseProblem& problem, const SimulationOptions& options) {
    protocol.validate();
    OcpConfig cfg;
    cfg.control_stride = options.control_stride;
    cfg.steady_state = options.steady_state;
    const ImpulseOcp ocp(model, problem, protocol.grid, cfg);

    SimulationSetup setup;
    setup.grid = ocp.integration_grid();
    setup.stride = options.control_stride;
    setup.impulse_node = ocp.impulse_node();
    setup.direction = problem.direction;
    setup.alpha = problem.alpha;

    const double dt = setup.grid.dt();
    double max_norm = 0.0;
    setup.ops.reserve(protocol.values.size());
    for (double p : protocol.values) {
        const SystemMatrices m = model.evaluate(p);
        if (m.state_dim() > kMaxDim) {
            throw Error(ErrorCode::kValidity, "simulation supports at most " + std::to_string(kMaxDim) + " states");
        }
        if (!m.N.isZero(0.0)) {
            throw Error(ErrorCode::kValidity, "simulation requires uncorrelated process and measurement noise");
        }
        auto [F, Qd] = discretize(m.A, m.Q, dt);
        StepOperators op;
        op.F_inv = F.inverse();
        op.F = std::move(F);
        op.noise = psd_sqrt(Qd);
        op.C_eff = m.eta.diagonal().cwiseSqrt().asDiagonal() * m.C;
        op.N = m.N;
        setup.ops.push_back(std::move(op));
        max_norm = std::max(max_norm, m.A.norm());
    }
    if (max_norm * dt >= 0.1) {
        std::ostringstream os;
        os << "coarse time step: ||A|| dt = " << max_norm * dt;
        setup.warnings.push_back(os.str());
    }

    CovarianceTraces tr = ocp.traces(protocol.values);
    setup.forward = std::move(tr.forward);
    setup.backward = std::move(tr.backward);

    const std::size_t kp = setup.impulse_node;
    const std::size_t steps = setup.grid.steps();
    setup.forward_gain.reserve(kp);
    for (std::size_t k = 0; k < kp; ++k) {
        const StepOperators& op = setup.at(k);
        const SystemMatrices m = model.evaluate(protocol.values[k / setup.stride]);
        const Matrix sqrt_eta = m.eta.diagonal().cwiseSqrt().asDiagonal();
        setup.forward_gain.push_back(setup.forward.values[k] * op.C_eff.transpose() - op.N.transpose() * sqrt_eta);
    }
    setup.backward_gain.reserve(steps - kp);
    for (std::size_t k = kp; k < steps; ++k) {
        const StepOperators& op = setup.at(k);
        const SystemMatrices m = model.evaluate(protocol.values[k / setup.stride]);
        const Matrix sqrt_eta = m.eta.diagonal().cwiseSqrt().asDiagonal();
        setup.backward_gain.push_back(setup.backward.values[k] * op.C_eff.transpose() +
                                      op.N.transpose() * sqrt_eta);
    }

    const SystemMatrices m0 = model.evaluate(protocol.values.front());
    const Eigen::Index d = m0.state_dim();
    setup.initial_root = is_hurwitz(m0.A) ? psd_sqrt(solve_lyapunov(m0.A, m0.Q)) : Matrix::Zero(d, d);

    setup.theoretical_variance = projected_variance(
        combined_covariance(setup.forward.values[kp], setup.backward.values[kp]), setup.direction);
    return setup;
}

MeasurementRecord simulate_record(const SimulationSetup& setup, std::uint64_t seed) {
    const Eigen::Index d = setup.state_dim();
    const Eigen::Index m = setup.channels();
    const std::size_t steps = setup.grid.steps();
    const double dt = setup.grid.dt();
    const double sqrt_dt = std::sqrt(dt);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto draw = [&](SmallVec& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    };

    MeasurementRecord record;
    record.grid = setup.grid;
    record.seed = seed;
    record.impulse_node = setup.impulse_node;
    record.increments.resize(m, static_cast<Eigen::Index>(steps));

    SmallVec xi(d);
    SmallVec x(d);
    SmallVec next(d);
    SmallVec zeta(m);
    draw(xi);
    x.noalias() = setup.initial_root * xi;
    for (std::size_t k = 0; k < steps; ++k) {
        if (k == setup.impulse_node) {
            record.state_at_impulse = x;
            x += setup.alpha * setup.direction;
        }
        const StepOperators& op = setup.at(k);
        draw(zeta);
        record.increments.col(static_cast<Eigen::Index>(k)).noalias() = dt * (op.C_eff * x);
        record.increments.col(static_cast<Eigen::Index>(k)) += sqrt_dt * zeta;
        draw(xi);
        next.noalias() = op.F * x;
        next.noalias() += op.noise * xi;
        x = next;
    }
    return record;
}

std::vector<Vector> filter_forward(const MeasurementRecord& record, const SimulationSetup& setup) {
    check_record(record, setup);
    const Eigen::Index d = setup.state_dim();
    const double dt = setup.grid.dt();
    std::vector<Vector> means;
    means.reserve(setup.impulse_node + 1);
    SmallVec r = SmallVec::Zero(d);
    SmallVec innov(setup.channels());
    SmallVec tmp(d);
    means.emplace_back(r);
    for (std::size_t k = 0; k < setup.impulse_node; ++k) {
        const StepOperators& op = setup.at(k);
        innov = record.increments.col(static_cast<Eigen::Index>(k));
        innov.noalias() -= dt * (op.C_eff * r);
        tmp = r;
        tmp.noalias() += setup.forward_gain[k] * innov;
        r.noalias() = op.F * tmp;
        if (!r.allFinite()) throw IntegrationDiverged(k, "forward filter produced a non-finite mean");
        means.emplace_back(r);
    }
    return means;
}

std::vector<Vector> filter_backward(const MeasurementRecord& record, const SimulationSetup& setup) {
    check_record(record, setup);
    const Eigen::Index d = setup.state_dim();
    const double dt = setup.grid.dt();
    const std::size_t kp = setup.impulse_node;
    const std::size_t steps = setup.grid.steps();
    std::vector<Vector> means(steps - kp + 1);
    SmallVec r = SmallVec::Zero(d);
    SmallVec innov(setup.channels());
    SmallVec tmp(d);
    means.back() = r;
    for (std::size_t k = steps; k-- > kp;) {
        const StepOperators& op = setup.at(k);
        tmp.noalias() = op.F_inv * r;
        innov = record.increments.col(static_cast<Eigen::Index>(k));
        innov.noalias() -= dt * (op.C_eff * tmp);
        r = tmp;
        r.noalias() += setup.backward_gain[k - kp] * innov;
        if (!r.allFinite()) throw IntegrationDiverged(k, "backward filter produced a non-finite mean");
        means[k - kp] = r;
    }
    return means;
}

TrialResult estimate_impulse(const MeasurementRecord& record, const SimulationSetup& setup) {
    TrialResult result;
    result.seed = record.seed;
    result.r_fwd_tp = filter_forward(record, setup).back();
    result.r_back_tp = filter_backward(record, setup).front();
    result.delta_r_hat = result.r_back_tp - result.r_fwd_tp;
    result.alpha_hat = setup.direction.dot(result.delta_r_hat);
    result.state_tp = record.state_at_impulse;
    return result;
}

EnsembleStats run_ensemble(const SimulationSetup& setup, std::size_t trials, std::uint64_t base_seed,
                           unsigned threads) {
    if (trials < 2) throw Error(ErrorCode::kRange, "an ensemble needs at least two trials");
    EnsembleStats stats;
    stats.trials = trials;
    stats.base_seed = base_seed;
    stats.alpha = setup.alpha;
    stats.theoretical_var = setup.theoretical_variance;
    stats.results.resize(trials);
    detail::parallel_for(trials, threads, [&](std::size_t k) {
        try {
            stats.results[k] = estimate_impulse(simulate_record(setup, base_seed + k), setup);
        } catch (const Error& e) {
            throw Error(e.code(), "trial " + std::to_string(k) + ": " + e.what());
        }
    });

    double mean = 0.0;
    for (const auto& r : stats.results) mean += r.alpha_hat - setup.alpha;
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (const auto& r : stats.results) {
        const double e = r.alpha_hat - setup.alpha - mean;
        ss += e * e;
    }
    stats.mean_error = mean;
    stats.var_error = ss / static_cast<double>(trials - 1);
    stats.z_score = (stats.var_error - stats.theoretical_var) /
                    (stats.theoretical_var * std::sqrt(2.0 / static_cast<double>(trials)));
    return stats;
}

EnsembleStats run_ensemble(const ParametricModel& model, const ControlProtocol& protocol,
                           const ImpulseProblem& problem, std::size_t trials, std::uint64_t base_seed,
                           const SimulationOptions& options) {
    const SimulationSetup setup = prepare_simulation(model, protocol, problem, options);
    return run_ensemble(setup, trials, base_seed, options.threads);
}

}  // namespace kickshape
