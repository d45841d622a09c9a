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


#include "kickshape/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kickshape/error.hpp"
#include "parallel.hpp"

namespace kickshape {

void ControlProtocol::validate() const {
    if (values.size() != grid.steps()) {
        throw Error(ErrorCode::kShape, "protocol has " + std::to_string(values.size()) + " values for " +
                                           std::to_string(grid.steps()) + " control intervals");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]) || !bounds.contains(values[k])) {
            std::ostringstream os;
            os << "control " << k << " = " << values[k] << " outside [" << bounds.lower << ", " << bounds.upper
               << "]";
            throw Error(ErrorCode::kAdmissibility, os.str());
        }
    }
}

ControlProtocol ControlProtocol::zeros(const TimeGrid& grid, const Bounds& bounds) {
    return ControlProtocol{grid, std::vector<double>(grid.steps(), bounds.clamp(0.0)), bounds};
}

void OcpConfig::validate() const {
    if (gamma_reg && !(*gamma_reg >= 0.0)) throw Error(ErrorCode::kValidity, "gamma_reg must be >= 0");
    if (max_iters == 0) throw Error(ErrorCode::kValidity, "max_iters must be positive");
    if (!(grad_tol > 0.0)) throw Error(ErrorCode::kValidity, "grad_tol must be positive");
    if (!(fd_step > 0.0)) throw Error(ErrorCode::kValidity, "fd_step must be positive");
    if (control_stride == 0) throw Error(ErrorCode::kValidity, "control_stride must be >= 1");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw Error(ErrorCode::kValidity, "armijo_c1 must be in (0, 1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw Error(ErrorCode::kValidity, "backtrack_factor must be in (0, 1)");
    }
}

double default_gamma_reg(double baseline_variance, const Bounds& bounds, double horizon) {
    const double p_max = std::max(std::abs(bounds.lower), std::abs(bounds.upper));
    return 0.05 * baseline_variance / (p_max * horizon);
}

TimeGrid make_control_grid(const ParametricModel& model, const ImpulseProblem& problem,
                           std::size_t steps_per_period, std::size_t stride) {
    if (steps_per_period == 0 || stride == 0) throw Error(ErrorCode::kRange, "grid resolution must be positive");
    const double dt = model.reference_period() / static_cast<double>(steps_per_period);
    const double intervals = std::round(problem.horizon / (dt * static_cast<double>(stride)));
    if (intervals < 2.0) throw Error(ErrorCode::kRange, "horizon shorter than two control intervals");
    return TimeGrid(0.0, problem.horizon, static_cast<std::size_t>(intervals));
}

// Covariances at the control nodes of the nominal protocol. forward[i] is
// Sigma at control node i (i <= impulse node), backward[i] is Pi at control
// node i (i >= impulse node, other entries empty).
struct ImpulseOcp::Legs {
    std::vector<Matrix> forward;
    std::vector<Matrix> backward;
    double forward_variance = 0.0;
    double backward_variance = 0.0;
};

ImpulseOcp::ImpulseOcp(ParametricModel model, ImpulseProblem problem, TimeGrid control_grid, OcpConfig config)
    : model_(std::move(model)),
      problem_(std::move(problem)),
      control_grid_(control_grid),
      config_(std::move(config)) {
    config_.validate();
    problem_.validate();
    if (control_grid_.t0() != 0.0 || std::abs(control_grid_.t1() - problem_.horizon) > 1e-9 * problem_.horizon) {
        throw Error(ErrorCode::kAlignment, "control grid must span [0, T]");
    }
    integration_grid_ = control_grid_.refined(config_.control_stride);
    impulse_control_node_ = control_grid_.nearest_node(problem_.t_p);
    if (impulse_control_node_ == 0 || impulse_control_node_ == control_grid_.steps()) {
        throw Error(ErrorCode::kRange, "impulse time must fall strictly inside the control grid");
    }
    const Eigen::Index dim = model_.evaluate(model_.bounds().clamp(0.0)).state_dim();
    if (problem_.direction.size() != dim) throw Error(ErrorCode::kShape, "impulse direction has wrong length");
    seed_covariance_ = Matrix::Identity(dim, dim);

    const double p0 = model_.bounds().clamp(0.0);
    baseline_variance_ = projected_variance(
        combined_covariance(forward_steady_state(p0), backward_steady_state(p0)), problem_.direction);
    gamma_reg_ = config_.gamma_reg ? *config_.gamma_reg
                                   : default_gamma_reg(baseline_variance_, model_.bounds(), problem_.horizon);
}

Matrix ImpulseOcp::forward_steady_state(double p) const {
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = forward_cache_.find(p); it != forward_cache_.end()) return it->second;
    }
    Matrix s = steady_state(Flow::kForward, model_.evaluate(p), seed_covariance_, config_.steady_state);
    std::lock_guard lock(cache_mutex_);
    return forward_cache_.emplace(p, std::move(s)).first->second;
}

Matrix ImpulseOcp::backward_steady_state(double p) const {
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = backward_cache_.find(p); it != backward_cache_.end()) return it->second;
    }
    Matrix s = steady_state(Flow::kBackward, model_.evaluate(p), seed_covariance_, config_.steady_state);
    std::lock_guard lock(cache_mutex_);
    return backward_cache_.emplace(p, std::move(s)).first->second;
}

void ImpulseOcp::check_controls(std::span<const double> controls) const {
    if (controls.size() != control_grid_.steps()) {
        throw Error(ErrorCode::kShape, "expected " + std::to_string(control_grid_.steps()) + " controls, got " +
                                           std::to_string(controls.size()));
    }
}

std::vector<SystemMatrices> ImpulseOcp::schedule_for(std::span<const double> controls) const {
    check_controls(controls);
    std::vector<SystemMatrices> sched;
    sched.reserve(controls.size());
    for (double p : controls) sched.push_back(model_.evaluate(p));
    return sched;
}

double ImpulseOcp::regularization(std::span<const double> controls) const {
    const double dt = control_grid_.dt();
    double sum = 0.0;
    for (double p : controls) sum += std::abs(p) * dt;
    return gamma_reg_ * sum;
}

ControlProtocol ImpulseOcp::make_protocol(std::vector<double> values) const {
    ControlProtocol protocol{control_grid_, std::move(values), model_.bounds()};
    protocol.validate();
    return protocol;
}

std::pair<Matrix, Matrix> ImpulseOcp::covariances_at_impulse(std::span<const double> controls) const {
    const auto sched = schedule_for(controls);
    const std::size_t stride = config_.control_stride;
    const ModelSchedule schedule = [&](std::size_t step) -> const SystemMatrices& { return sched[step / stride]; };
    const std::size_t kp = impulse_node();
    try {
        Matrix fwd = propagate(Flow::kForward, forward_steady_state(controls.front()), schedule, integration_grid_,
                               0, kp);
        Matrix bwd = propagate(Flow::kBackward, backward_steady_state(controls.back()), schedule,
                               integration_grid_, kp, integration_grid_.steps());
        return {std::move(fwd), std::move(bwd)};
    } catch (const IntegrationDiverged& e) {
        throw Error(ErrorCode::kInfeasibleProtocol, e.what());
    }
}

CostValue ImpulseOcp::evaluate(std::span<const double> controls) const {
    const auto [fwd, bwd] = covariances_at_impulse(controls);
    const double fwd_var = projected_variance(fwd, problem_.direction);
    const double bwd_var = projected_variance(bwd, problem_.direction);
    return {fwd_var + bwd_var + regularization(controls), fwd_var + bwd_var};
}

ImpulseOcp::Legs ImpulseOcp::nominal_legs(std::span<const double> controls,
                                          const std::vector<SystemMatrices>& sched) const {
    const std::size_t stride = config_.control_stride;
    const std::size_t ip = impulse_control_node_;
    const std::size_t kc = control_grid_.steps();
    const ModelSchedule schedule = [&](std::size_t step) -> const SystemMatrices& { return sched[step / stride]; };
    Legs legs;
    legs.forward.resize(kc + 1);
    legs.backward.resize(kc + 1);
    try {
        legs.forward[0] = forward_steady_state(controls.front());
        for (std::size_t i = 0; i < ip; ++i) {
            legs.forward[i + 1] = propagate(Flow::kForward, legs.forward[i], schedule, integration_grid_,
                                            i * stride, (i + 1) * stride);
        }
        legs.backward[kc] = backward_steady_state(controls.back());
        for (std::size_t i = kc; i-- > ip;) {
            legs.backward[i] = propagate(Flow::kBackward, legs.backward[i + 1], schedule, integration_grid_,
                                         i * stride, (i + 1) * stride);
        }
    } catch (const IntegrationDiverged& e) {
        throw Error(ErrorCode::kInfeasibleProtocol, e.what());
    }
    legs.forward_variance = projected_variance(legs.forward[ip], problem_.direction);
    legs.backward_variance = projected_variance(legs.backward[ip], problem_.direction);
    return legs;
}

// Cost with control `index` replaced by `value`; only the affected leg is
// re-integrated, starting from the cached covariance at the interval edge.
double ImpulseOcp::probe(std::span<const double> controls, const std::vector<SystemMatrices>& sched,
                         const Legs& legs, std::size_t index, double value) const {
    const std::size_t stride = config_.control_stride;
    const std::size_t ip = impulse_control_node_;
    const std::size_t kc = control_grid_.steps();
    const SystemMatrices replaced = model_.evaluate(value);
    const ModelSchedule schedule = [&](std::size_t step) -> const SystemMatrices& {
        const std::size_t i = step / stride;
        return i == index ? replaced : sched[i];
    };
    std::vector<double> perturbed(controls.begin(), controls.end());
    perturbed[index] = value;
    const double reg = regularization(perturbed);
    try {
        if (index < ip) {
            const Matrix start = index == 0 ? forward_steady_state(value) : legs.forward[index];
            const Matrix s = propagate(Flow::kForward, start, schedule, integration_grid_, index * stride,
                                       ip * stride);
            return projected_variance(s, problem_.direction) + legs.backward_variance + reg;
        }
        const Matrix start = index + 1 == kc ? backward_steady_state(value) : legs.backward[index + 1];
        const Matrix s = propagate(Flow::kBackward, start, schedule, integration_grid_, ip * stride,
                                   (index + 1) * stride);
        return legs.forward_variance + projected_variance(s, problem_.direction) + reg;
    } catch (const IntegrationDiverged&) {
        return std::numeric_limits<double>::infinity();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kNoSteadyState) return std::numeric_limits<double>::infinity();
        throw;
    }
}

namespace {

// Central difference with one-sided fallback when a probe is infeasible or
// clipped away by the bounds.
double difference(double center, double lo, double hi, double f_lo, double f_hi, double f_center,
                  std::size_t index) {
    const bool lo_ok = lo < center && std::isfinite(f_lo);
    const bool hi_ok = hi > center && std::isfinite(f_hi);
    if (lo_ok && hi_ok) return (f_hi - f_lo) / (hi - lo);
    if (hi_ok) return (f_hi - f_center) / (hi - center);
    if (lo_ok) return (f_center - f_lo) / (center - lo);
    throw Error(ErrorCode::kGradientUnavailable, "no feasible probe for control " + std::to_string(index));
}

}  // namespace

std::vector<double> ImpulseOcp::gradient(std::span<const double> controls) const {
    const auto sched = schedule_for(controls);
    const Legs legs = nominal_legs(controls, sched);
    const double center = legs.forward_variance + legs.backward_variance + regularization(controls);
    const Bounds& b = model_.bounds();
    std::vector<double> grad(controls.size());
    detail::parallel_for(controls.size(), config_.threads, [&](std::size_t i) {
        const double lo = b.clamp(controls[i] - config_.fd_step);
        const double hi = b.clamp(controls[i] + config_.fd_step);
        const double f_lo = lo < controls[i] ? probe(controls, sched, legs, i, lo) : center;
        const double f_hi = hi > controls[i] ? probe(controls, sched, legs, i, hi) : center;
        grad[i] = difference(controls[i], lo, hi, f_lo, f_hi, center, i);
    });
    return grad;
}

std::vector<double> ImpulseOcp::dense_gradient(std::span<const double> controls) const {
    check_controls(controls);
    const double center = evaluate(controls).cost;
    const Bounds& b = model_.bounds();
    std::vector<double> grad(controls.size());
    detail::parallel_for(controls.size(), config_.threads, [&](std::size_t i) {
        std::vector<double> u(controls.begin(), controls.end());
        auto cost_at = [&](double v) {
            u[i] = v;
            try {
                return evaluate(u).cost;
            } catch (const Error& e) {
                if (e.code() == ErrorCode::kInfeasibleProtocol || e.code() == ErrorCode::kNoSteadyState) {
                    return std::numeric_limits<double>::infinity();
                }
                throw;
            }
        };
        const double lo = b.clamp(controls[i] - config_.fd_step);
        const double hi = b.clamp(controls[i] + config_.fd_step);
        const double f_lo = lo < controls[i] ? cost_at(lo) : center;
        const double f_hi = hi > controls[i] ? cost_at(hi) : center;
        grad[i] = difference(controls[i], lo, hi, f_lo, f_hi, center, i);
    });
    return grad;
}

OcpResult ImpulseOcp::optimize(const ControlProtocol& init) const {
    init.validate();
    if (!(init.grid == control_grid_)) throw Error(ErrorCode::kAlignment, "initial protocol uses another grid");

    const Bounds& b = model_.bounds();
    const std::size_t n = init.values.size();
    std::vector<double> u = init.values;
    double cost = evaluate(u).cost;
    const double initial_cost = cost;

    OcpResult result;
    result.cost_history.push_back(cost);
    result.gamma_reg = gamma_reg_;

    auto safe_cost = [&](const std::vector<double>& v) {
        try {
            return evaluate(v).cost;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kInfeasibleProtocol || e.code() == ErrorCode::kNoSteadyState) {
                return std::numeric_limits<double>::infinity();
            }
            throw;
        }
    };

    std::vector<double> prev_u;
    std::vector<double> prev_g;
    double step = 0.0;
    std::size_t iter = 0;
    for (; iter < config_.max_iters; ++iter) {
        const std::vector<double> g = gradient(u);

        double pg_norm2 = 0.0;
        double g_inf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = u[i] - b.clamp(u[i] - g[i]);
            pg_norm2 += d * d;
            g_inf = std::max(g_inf, std::abs(g[i]));
        }
        if (std::sqrt(pg_norm2) < config_.grad_tol * std::max(std::abs(initial_cost), 1e-300)) {
            result.converged = true;
            break;
        }

        // Barzilai-Borwein trial step, falling back to a move of the full
        // admissible width along the largest gradient entry.
        double trial = (b.upper - b.lower) / g_inf;
        if (!prev_u.empty()) {
            double ss = 0.0;
            double sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = u[i] - prev_u[i];
                ss += s * s;
                sy += s * (g[i] - prev_g[i]);
            }
            if (sy > 0.0 && ss > 0.0) trial = ss / sy;
            else if (step > 0.0) trial = 2.0 * step;
        }

        bool accepted = false;
        std::vector<double> v(n);
        double v_cost = 0.0;
        for (std::size_t bt = 0; bt <= config_.max_backtracks; ++bt, trial *= config_.backtrack_factor) {
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = b.clamp(u[i] - trial * g[i]);
                decrease += g[i] * (u[i] - v[i]);
            }
            if (!(decrease > 0.0)) break;
            v_cost = safe_cost(v);
            if (v_cost <= cost - config_.armijo_c1 * decrease) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (iter == 0) result.stalled = true;
            else result.converged = true;
            break;
        }
        step = trial;
        prev_u = std::move(u);
        prev_g = g;
        u = v;
        cost = v_cost;
        result.cost_history.push_back(cost);
    }

    result.iterations = iter;
    result.protocol = make_protocol(u);
    const CostValue final_value = evaluate(u);
    result.final_cost = final_value.cost;
    result.final_projected_variance = final_value.projected_variance;
    result.steady_state_projected_variance = baseline_variance_;
    result.ratio = result.final_projected_variance / baseline_variance_;
    return result;
}

CovarianceTraces ImpulseOcp::traces(std::span<const double> controls) const {
    const auto sched = schedule_for(controls);
    const std::size_t stride = config_.control_stride;
    const ModelSchedule schedule = [&](std::size_t step) -> const SystemMatrices& { return sched[step / stride]; };
    return {integrate(Flow::kForward, forward_steady_state(controls.front()), schedule, integration_grid_),
            integrate(Flow::kBackward, backward_steady_state(controls.back()), schedule, integration_grid_)};
}

CostValue evaluate_cost(const ControlProtocol& protocol, const ParametricModel& model,
                        const ImpulseProblem& problem, const OcpConfig& config) {
    protocol.validate();
    const ImpulseOcp ocp(model, problem, protocol.grid, config);
    return ocp.evaluate(protocol.values);
}

std::vector<double> gradient(const ControlProtocol& protocol, const ParametricModel& model,
                             const ImpulseProblem& problem, const OcpConfig& config) {
    protocol.validate();
    const ImpulseOcp ocp(model, problem, protocol.grid, config);
    return ocp.gradient(protocol.values);
}

OcpResult optimize(const ParametricModel& model, const ImpulseProblem& problem, const OcpConfig& config,
                   const ControlProtocol& init) {
    const ImpulseOcp ocp(model, problem, init.grid, config);
    return ocp.optimize(init);
}

ControlProtocol rectangular_protocol(const TimeGrid& grid, const RectangularWave& wave, const Bounds& bounds) {
    if (!(wave.frequency > 0.0)) throw Error(ErrorCode::kRange, "square-wave frequency must be positive");
    if (!bounds.contains(wave.depth) || !bounds.contains(-wave.depth)) {
        throw Error(ErrorCode::kAdmissibility, "square-wave depth outside the admissible bounds");
    }
    const double tol = 1e-9 * (grid.t1() - grid.t0());
    if (!(wave.window_start < wave.window_end) || wave.window_start < grid.t0() - tol ||
        wave.window_end > grid.t1() + tol) {
        throw Error(ErrorCode::kRange, "modulation window outside the grid");
    }

    // Switching times: each half-cycle advances the phase by pi.
    struct Segment {
        double end;
        double level;
    };
    std::vector<Segment> segments;
    const double pi = std::acos(-1.0);
    long long half = static_cast<long long>(std::floor(wave.phase / pi));
    double remaining = static_cast<double>(half + 1) * pi - wave.phase;
    double t = wave.window_start;
    while (t < wave.window_end) {
        const double level = half % 2 == 0 ? wave.depth : -wave.depth;
        const double rate = wave.frequency * (wave.phase_rate ? wave.phase_rate(level) : 1.0);
        if (!(rate > 0.0)) throw Error(ErrorCode::kRange, "phase rate must stay positive");
        const double end = std::min(t + remaining / rate, wave.window_end);
        segments.push_back({end, level});
        t = end;
        ++half;
        remaining = pi;
    }

    ControlProtocol protocol{grid, std::vector<double>(grid.steps(), 0.0), bounds};
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const double mid = 0.5 * (grid.time(k) + grid.time(k + 1));
        if (mid < wave.window_start || mid >= wave.window_end) continue;
        while (seg + 1 < segments.size() && mid >= segments[seg].end) ++seg;
        protocol.values[k] = segments[seg].level;
    }
    return protocol;
}

}  // namespace kickshape
