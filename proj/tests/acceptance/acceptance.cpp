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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "config.hpp"
#include "kickshape/error.hpp"
#include "kickshape/gaussian_model.hpp"
#include "kickshape/montecarlo.hpp"
#include "kickshape/ocp.hpp"
#include "kickshape/riccati.hpp"

using namespace kickshape;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-34s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SystemMatrices scalar(double a, double c, double q) {
    SystemMatrices m;
    m.A = Matrix::Constant(1, 1, a);
    m.C = Matrix::Constant(1, 1, c);
    m.Q = Matrix::Constant(1, 1, q);
    m.N = Matrix::Zero(1, 1);
    m.eta = Matrix::Identity(1, 1);
    return m;
}

cli::RunConfig config(const char* name) { return cli::load_config(std::string(KICKSHAPE_CONFIG_DIR) + "/" + name); }

struct NemsRun {
    cli::RunConfig cfg = config("nems.ini");
    ParametricModel model = cfg.model();
    ImpulseProblem problem = cfg.problem();
    ImpulseOcp ocp{model, problem, cfg.control_grid(), cfg.ocp};
    std::optional<OcpResult> optimized;
};

ControlProtocol square_wave(const ImpulseOcp& ocp) {
    const double depth = std::min(-ocp.model().bounds().lower, ocp.model().bounds().upper);
    const TimeGrid& g = ocp.control_grid();
    return rectangular_protocol(g, RectangularWave{2.0 * ocp.model().omega0(), depth, 0.0, g.t0(), g.t1(), {}},
                                ocp.model().bounds());
}

}  // namespace

int main() {
    NemsRun nems;

    criterion(1, "scalar Riccati oracle", [] {
        const SystemMatrices m = scalar(-1.0, 1.0, 1.0);
        const Matrix s = steady_state(Flow::kForward, m, Matrix::Identity(1, 1));
        const double err = std::abs(s(0, 0) - (std::sqrt(2.0) - 1.0));
        const double res = rhs_forward(s, m).norm();
        return Outcome{err <= 1e-8 && res < 1e-8, fmt("|S - (sqrt2 - 1)| = %.2e, |rhs| = %.2e", err, res)};
    });

    criterion(2, "RK4 fourth-order convergence", [] {
        const SystemMatrices m = scalar(-1.0, 0.0, 1.0);
        auto error = [&](std::size_t steps) {
            const TimeGrid g(0.0, 2.0, steps);
            const Matrix s = propagate(Flow::kForward, Matrix::Zero(1, 1),
                                       [&](std::size_t) -> const SystemMatrices& { return m; }, g, 0, steps);
            return std::abs(s(0, 0) - 0.5 * (1.0 - std::exp(-4.0)));
        };
        const double ratio = error(20) / error(40);
        return Outcome{ratio >= 12.0, fmt("error ratio on halving dt = %.2f", ratio)};
    });

    criterion(3, "quantum validity along trajectory", [] {
        const cli::RunConfig cfg = config("particle.ini");
        const ParametricModel model = cfg.model();
        const SystemMatrices m = model.evaluate(0.0);
        const double period = model.reference_period();
        const TimeGrid g(0.0, 50.0 * period, 50 * cfg.grid.steps_per_period);
        const CovarianceTrajectory tr = integrate(Flow::kForward, 0.5 * Matrix::Identity(2, 2),
                                                  [&](std::size_t) -> const SystemMatrices& { return m; }, g);
        const SymplecticForm J = build_symplectic(1);
        std::size_t bad = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (const Matrix& s : tr.values) {
            if (!check_uncertainty(s, J, 1e-9 * s.trace())) ++bad;
            worst = std::min(worst, uncertainty_margin(s, J) / s.trace());
        }
        return Outcome{bad == 0, fmt("%zu of %zu nodes violate; min margin/trace = %.3e", bad, tr.values.size(), worst)};
    });

    criterion(4, "rectangular limit cycle 1.8-2.7x", [&] {
        const ImpulseOcp& ocp = nems.ocp;
        const CovarianceTraces tr = ocp.traces(square_wave(ocp).values);
        const Vector& n = nems.problem.direction;
        const double base = std::sqrt(ocp.baseline_variance());
        const double period = nems.model.reference_period();
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t k = 0; k < tr.forward.values.size(); ++k) {
            if (std::abs(tr.forward.grid.time(k) - nems.problem.t_p) > 5.0 * period) continue;
            const double r =
                std::sqrt(projected_variance(combined_covariance(tr.forward.values[k], tr.backward.values[k]), n)) /
                base;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        return Outcome{lo >= 1.8 && hi <= 2.7, fmt("limit cycle [%.3f, %.3f] x steady state", lo, hi)};
    });

    criterion(5, "NEMS optimization, variance <= 0.5", [&] {
        nems.optimized = nems.ocp.optimize(ControlProtocol::zeros(nems.ocp.control_grid(), nems.model.bounds()));
        const OcpResult& r = *nems.optimized;
        const double sq = std::sqrt(r.ratio);
        const bool stretch = std::abs(sq - 0.49) <= 0.15;
        return Outcome{r.ratio <= 0.5, fmt("variance ratio %.4f, sqrt ratio %.4f, stretch 0.49+-0.15 %s, %zu iters",
                                           r.ratio, sq, stretch ? "met" : "not met", r.iterations)};
    });

    criterion(6, "particle optimization, variance <= 0.5", [] {
        const cli::RunConfig cfg = config("particle.ini");
        const ImpulseOcp ocp(cfg.model(), cfg.problem(), cfg.control_grid(), cfg.ocp);
        const OcpResult r = ocp.optimize(ControlProtocol::zeros(ocp.control_grid(), ocp.model().bounds()));
        return Outcome{r.ratio <= 0.5,
                       fmt("variance ratio %.4f, sqrt ratio %.4f, %zu iters", r.ratio, std::sqrt(r.ratio), r.iterations)};
    });

    criterion(7, "Monte Carlo covariance consistency", [&] {
        if (!nems.optimized) return Outcome{false, "no optimized protocol"};
        const auto& s = nems.cfg.simulation;
        const SimulationOptions opt = nems.cfg.simulation_options();
        ImpulseProblem problem = nems.problem;
        problem.alpha = s.alpha;
        const EnsembleStats zero = run_ensemble(nems.model, ControlProtocol::zeros(nems.ocp.control_grid(),
                                                nems.model.bounds()), problem, s.trials, s.base_seed, opt);
        const EnsembleStats best =
            run_ensemble(nems.model, nems.optimized->protocol, problem, s.trials, s.base_seed, opt);
        const double gate = 3.0 * std::sqrt(2.0 / static_cast<double>(s.trials));
        const double dz = zero.var_error / zero.theoretical_var - 1.0;
        const double db = best.var_error / best.theoretical_var - 1.0;
        const double emp = best.var_error / zero.var_error;
        const double theo = best.theoretical_var / zero.theoretical_var;
        const double dr = emp / theo - 1.0;
        const bool pass = std::abs(dz) <= gate && std::abs(db) <= gate && std::abs(dr) <= 0.15;
        return Outcome{pass, fmt("zero %+.3f, optimized %+.3f (gate %.3f); ratio %.3f vs %.3f (%+.3f)", dz, db, gate,
                                 emp, theo, dr)};
    });

    criterion(8, "phase-shift mechanism", [&] {
        if (!nems.optimized) return Outcome{false, "no optimized protocol"};
        const ImpulseOcp& ocp = nems.ocp;
        const double base = ocp.baseline_variance();
        const double rect = ocp.evaluate(square_wave(ocp).values).projected_variance;
        const double best = nems.optimized->final_projected_variance;
        return Outcome{rect > base && best < base,
                       fmt("rectangular %.3f, optimized %.3f x steady-state variance", rect / base, best / base)};
    });

    criterion(9, "separability", [&] {
        const ImpulseOcp& ocp = nems.ocp;
        const std::size_t n = ocp.control_grid().steps();
        const std::size_t ip = ocp.impulse_control_node();
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(nems.model.bounds().lower, nems.model.bounds().upper);
        std::vector<double> controls(n);
        for (double& v : controls) v = u(rng);
        const auto [sigma, pi] = ocp.covariances_at_impulse(controls);
        std::size_t checked = 0, broken = 0;
        for (std::size_t k = 0; k < n; k += 7) {
            auto w = controls;
            w[k] = -w[k];
            const auto [s2, p2] = ocp.covariances_at_impulse(w);
            broken += k < ip ? !(p2 == pi) : !(s2 == sigma);
            ++checked;
        }
        return Outcome{broken == 0, fmt("%zu perturbations, %zu changed the independent leg", checked, broken)};
    });

    criterion(10, "brute-force OCP oracle", [] {
        const ParametricModel model(
            "toy", [](double p) { return scalar(-(1.0 + p), 1.0, 1.0 + 10.0 * p * p); }, Bounds{}, 1.0, 1.0);
        ImpulseProblem problem;
        problem.t_p = 1.0;
        problem.horizon = 2.0;
        problem.direction = Vector::Ones(1);
        OcpConfig cfg;
        cfg.gamma_reg = 0.0;
        cfg.control_stride = 50;
        cfg.grad_tol = 1e-12;
        cfg.fd_step = 1e-6;
        cfg.threads = 1;
        const TimeGrid grid(0.0, 2.0, 2);
        const ImpulseOcp ocp(model, problem, grid, cfg);
        const OcpResult r = ocp.optimize(ControlProtocol::zeros(grid, model.bounds()));
        double worst_u = 0.0, worst_c = 0.0;
        const double zero = ocp.evaluate(std::vector<double>{0.0, 0.0}).cost;
        double total = zero;
        for (std::size_t leg = 0; leg < 2; ++leg) {
            double best = std::numeric_limits<double>::infinity(), arg = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const double p = -0.4 + 0.8 * i / 9999.0;
                std::vector<double> c{0.0, 0.0};
                c[leg] = p;
                const double v = ocp.evaluate(c).cost;
                if (v < best) {
                    best = v;
                    arg = p;
                }
            }
            worst_u = std::max(worst_u, std::abs(r.protocol.values[leg] - arg));
            total += best - zero;
        }
        worst_c = std::abs(r.final_cost - total) / total;
        return Outcome{worst_u <= 1e-3 && worst_c <= 1e-6,
                       fmt("control error %.2e, relative cost error %.2e", worst_u, worst_c)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
