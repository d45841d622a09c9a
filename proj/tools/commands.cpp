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


#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>

#include "csv.hpp"
#include "kickshape/error.hpp"
#include "kickshape/gaussian_model.hpp"
#include "plot.hpp"

namespace kickshape::cli {

namespace fs = std::filesystem;

namespace {

std::string path_in(const Context& ctx, const std::string& name) { return (fs::path(ctx.out_dir) / name).string(); }

void prepare_out_dir(const Context& ctx) {
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec || !fs::is_directory(ctx.out_dir)) {
        throw Error(ErrorCode::kConfig, "cannot create output directory '" + ctx.out_dir + "'");
    }
}

void report_warnings(const Context& ctx, const ParametricModel& model) {
    for (const auto& w : model.warnings()) *ctx.err << "warning: " << w << '\n';
}

void plot(const Context& ctx, const std::string& name, const Chart& chart) {
    if (!ctx.config.output.emit_plots) return;
    std::string error;
    if (!write_svg(path_in(ctx, name), chart, &error)) *ctx.err << "warning: plot " << name << " skipped: " << error << '\n';
}

struct Trace {
    std::vector<double> t;
    std::vector<double> fwd;
    std::vector<double> back;
    std::vector<double> sum;
};

Trace make_trace(const CovarianceTraces& tr, const Vector& n) {
    Trace out;
    const std::size_t count = tr.forward.values.size();
    for (std::size_t k = 0; k < count; ++k) {
        const double f = projected_variance(tr.forward.values[k], n);
        const double b = projected_variance(tr.backward.values[k], n);
        out.t.push_back(tr.forward.grid.time(k));
        out.fwd.push_back(std::sqrt(f));
        out.back.push_back(std::sqrt(b));
        out.sum.push_back(std::sqrt(f + b));
    }
    return out;
}

void write_trace(const Context& ctx, const std::string& name, const Trace& trace, double baseline_sqrt) {
    CsvWriter csv(path_in(ctx, name), ctx.config.hash(), {"t", "sqrt_fwd", "sqrt_back", "sqrt_sum", "rel_sum"});
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        csv.row(std::vector<double>{trace.t[k], trace.fwd[k], trace.back[k], trace.sum[k],
                                    trace.sum[k] / baseline_sqrt});
    }
    csv.close();
}

void write_protocol(const Context& ctx, const std::string& name, const ControlProtocol& protocol) {
    CsvWriter csv(path_in(ctx, name), ctx.config.hash(), {"t_start", "t_end", "p"});
    for (std::size_t k = 0; k < protocol.values.size(); ++k) {
        csv.row(std::vector<double>{protocol.grid.time(k), protocol.grid.time(k + 1), protocol.values[k]});
    }
    csv.close();
}

Series series(const std::string& label, const std::vector<double>& x, const std::vector<double>& y, double scale,
              const std::string& color) {
    Series s;
    s.label = label;
    s.x = x;
    s.y.reserve(y.size());
    for (double v : y) s.y.push_back(v / scale);
    s.color = color;
    return s;
}

Series protocol_series(const std::string& label, const ControlProtocol& protocol, const std::string& color) {
    Series s;
    s.label = label;
    s.color = color;
    s.steps = true;
    for (std::size_t k = 0; k < protocol.values.size(); ++k) {
        s.x.push_back(protocol.grid.time(k));
        s.y.push_back(protocol.values[k]);
    }
    s.x.push_back(protocol.grid.t1());
    s.y.push_back(protocol.values.back());
    return s;
}

struct Optimized {
    OcpResult result;
    Trace trace;
    double baseline = 0.0;
};

Optimized run_optimizer(const Context& ctx, const ImpulseOcp& ocp) {
    *ctx.err << "optimizing " << ocp.control_grid().steps() << " controls (gamma_reg = " << ocp.gamma_reg()
             << ")\n";
    Optimized o;
    o.result = ocp.optimize(ControlProtocol::zeros(ocp.control_grid(), ocp.model().bounds()));
    o.trace = make_trace(ocp.traces(o.result.protocol.values), ocp.problem().direction);
    o.baseline = ocp.baseline_variance();
    return o;
}

void write_optimized(const Context& ctx, const Optimized& o) {
    const OcpResult& r = o.result;
    write_protocol(ctx, "protocol.csv", r.protocol);
    write_trace(ctx, "uncertainty_trace.csv", o.trace, std::sqrt(o.baseline));
    const double sqrt_ratio = std::sqrt(r.ratio);
    const bool stretch = std::abs(sqrt_ratio - 0.49) <= 0.15;
    CsvWriter csv(path_in(ctx, "summary.csv"), ctx.config.hash(),
                  {"baseline_variance", "optimized_variance", "ratio", "sqrt_ratio", "final_cost", "gamma_reg",
                   "iterations", "converged", "stalled", "sqrt_ratio_near_0_49"});
    csv.row({num(o.baseline), num(r.final_projected_variance), num(r.ratio), num(sqrt_ratio), num(r.final_cost),
             num(r.gamma_reg), std::to_string(r.iterations), r.converged ? "1" : "0", r.stalled ? "1" : "0",
             stretch ? "1" : "0"});
    csv.close();

    *ctx.out << "baseline variance   " << num(o.baseline) << '\n'
             << "optimized variance  " << num(r.final_projected_variance) << '\n'
             << "variance ratio      " << r.ratio << '\n'
             << "sqrt ratio          " << sqrt_ratio << '\n'
             << "iterations          " << r.iterations << (r.converged ? " (converged)" : "") << '\n';
    if (r.stalled) *ctx.err << "warning: optimizer stalled at the initial protocol\n";

    Chart trace_chart{"Impulse estimation uncertainty", "t [s]", "relative uncertainty", {}};
    const double s = std::sqrt(o.baseline);
    trace_chart.series.push_back(series("forward", o.trace.t, o.trace.fwd, s, "#2ca02c"));
    trace_chart.series.push_back(series("backward", o.trace.t, o.trace.back, s, "#9467bd"));
    trace_chart.series.push_back(series("sum", o.trace.t, o.trace.sum, s, "#d62728"));
    plot(ctx, "uncertainty_trace.svg", trace_chart);
    Chart protocol_chart{"Optimized modulation", "t [s]", "p", {protocol_series("p(t)", r.protocol, "#d62728")}};
    plot(ctx, "protocol.svg", protocol_chart);
}

RectangularWave reference_wave(const RunConfig& cfg, const ParametricModel& model, const TimeGrid& grid) {
    RectangularWave wave;
    wave.frequency = 2.0 * model.omega0();
    wave.depth = std::min(-model.bounds().lower, model.bounds().upper);
    wave.window_start = grid.t0();
    wave.window_end = grid.t1();
    if (cfg.system == SystemType::kParticle) {
        wave.phase_rate = [](double p) { return std::sqrt(1.0 + p); };
    }
    return wave;
}

}  // namespace

std::string resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("KICKSHAPE_OUT_DIR"); env && *env) return env;
    return config.output.directory.empty() ? std::string(".") : config.output.directory;
}

int guarded(std::ostream& err, const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::kIntegrationDiverged:
            case ErrorCode::kNoSteadyState:
            case ErrorCode::kInfeasibleProtocol:
            case ErrorCode::kGradientUnavailable:
            case ErrorCode::kFactorization:
                return kExitDivergence;
            default:
                return kExitValidation;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cmd_steady_state(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ParametricModel model = cfg.model();
    report_warnings(ctx, model);
    const ImpulseOcp ocp(model, cfg.problem(), cfg.control_grid(), cfg.ocp);
    const double p0 = model.bounds().clamp(0.0);
    const Matrix sigma = ocp.forward_steady_state(p0);
    const Matrix pi = ocp.backward_steady_state(p0);
    const SymplecticForm J = build_symplectic(1);
    const double margin_fwd = uncertainty_margin(sigma, J);
    const double margin_back = uncertainty_margin(pi, J);
    const double fwd = projected_variance(sigma, ocp.problem().direction);
    const double back = projected_variance(pi, ocp.problem().direction);

    prepare_out_dir(ctx);
    CsvWriter csv(path_in(ctx, "steady_state.csv"), cfg.hash(), {"quantity", "value"});
    const std::pair<const char*, double> rows[] = {
        {"sigma_qq", sigma(0, 0)},          {"sigma_qp", sigma(0, 1)},          {"sigma_pp", sigma(1, 1)},
        {"pi_qq", pi(0, 0)},                {"pi_qp", pi(0, 1)},                {"pi_pp", pi(1, 1)},
        {"projected_forward", fwd},         {"projected_backward", back},       {"projected_variance", fwd + back},
        {"sqrt_projected_variance", std::sqrt(fwd + back)},
        {"uncertainty_margin_forward", margin_fwd}, {"uncertainty_margin_backward", margin_back},
    };
    for (const auto& [name, value] : rows) csv.row({name, num(value)});
    csv.close();

    *ctx.out << "Sigma_ss =\n" << sigma << "\nPi_ss =\n" << pi << '\n'
             << "n^T (Sigma_ss + Pi_ss) n = " << num(fwd + back) << '\n'
             << "uncertainty margin (forward, backward) = " << margin_fwd << ", " << margin_back << '\n';
    return kExitOk;
}

int cmd_optimize(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ParametricModel model = cfg.model();
    report_warnings(ctx, model);
    const ImpulseOcp ocp(model, cfg.problem(), cfg.control_grid(), cfg.ocp);
    prepare_out_dir(ctx);
    const Optimized o = run_optimizer(ctx, ocp);
    write_optimized(ctx, o);
    return o.result.stalled ? kExitStalled : kExitOk;
}

int cmd_compare(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ParametricModel model = cfg.model();
    report_warnings(ctx, model);
    const ImpulseProblem problem = cfg.problem();
    const ImpulseOcp ocp(model, problem, cfg.control_grid(), cfg.ocp);
    prepare_out_dir(ctx);

    const ControlProtocol rect = rectangular_protocol(ocp.control_grid(), reference_wave(cfg, model, ocp.control_grid()),
                                                      model.bounds());
    const Trace rect_trace = make_trace(ocp.traces(rect.values), problem.direction);
    const double baseline_sqrt = std::sqrt(ocp.baseline_variance());
    write_protocol(ctx, "rect_protocol.csv", rect);
    write_trace(ctx, "rect_trace.csv", rect_trace, baseline_sqrt);

    // Limit cycle: five reference periods either side of the impulse.
    const double period = model.reference_period();
    double lc_min = std::numeric_limits<double>::infinity();
    double lc_max = 0.0;
    double lc_mean = 0.0;
    std::size_t lc_count = 0;
    for (std::size_t k = 0; k < rect_trace.t.size(); ++k) {
        if (std::abs(rect_trace.t[k] - problem.t_p) > 5.0 * period) continue;
        const double r = rect_trace.sum[k] / baseline_sqrt;
        lc_min = std::min(lc_min, r);
        lc_max = std::max(lc_max, r);
        lc_mean += r;
        ++lc_count;
    }
    lc_mean /= static_cast<double>(std::max<std::size_t>(lc_count, 1));
    const std::size_t kp = ocp.impulse_node();

    const Optimized o = run_optimizer(ctx, ocp);
    write_optimized(ctx, o);

    CsvWriter csv(path_in(ctx, "compare.csv"), cfg.hash(), {"quantity", "value"});
    const std::pair<const char*, double> rows[] = {
        {"baseline_sqrt", baseline_sqrt},
        {"rect_sqrt_at_tp", rect_trace.sum[kp]},
        {"rect_rel_at_tp", rect_trace.sum[kp] / baseline_sqrt},
        {"rect_rel_fwd_at_tp", rect_trace.fwd[kp] / baseline_sqrt},
        {"rect_rel_back_at_tp", rect_trace.back[kp] / baseline_sqrt},
        {"rect_limit_cycle_min", lc_min},
        {"rect_limit_cycle_max", lc_max},
        {"rect_limit_cycle_mean", lc_mean},
        {"opt_sqrt_at_tp", o.trace.sum[kp]},
        {"opt_rel_at_tp", o.trace.sum[kp] / baseline_sqrt},
    };
    for (const auto& [name, value] : rows) csv.row({name, num(value)});
    csv.close();

    *ctx.out << "rectangular at t_p   " << rect_trace.sum[kp] / baseline_sqrt << " x baseline\n"
             << "rectangular cycle    [" << lc_min << ", " << lc_max << "] x baseline\n"
             << "optimized at t_p     " << o.trace.sum[kp] / baseline_sqrt << " x baseline\n";

    Chart chart{"Rectangular vs optimized modulation", "t [s]", "relative uncertainty", {}};
    chart.series.push_back(series("rectangular", rect_trace.t, rect_trace.sum, baseline_sqrt, "#1f77b4"));
    chart.series.push_back(series("optimized", o.trace.t, o.trace.sum, baseline_sqrt, "#d62728"));
    plot(ctx, "compare_trace.svg", chart);
    Chart decomposition{"Rectangular modulation: forward and backward", "t [s]", "relative uncertainty", {}};
    decomposition.series.push_back(series("forward", rect_trace.t, rect_trace.fwd, baseline_sqrt, "#2ca02c"));
    decomposition.series.push_back(series("backward", rect_trace.t, rect_trace.back, baseline_sqrt, "#9467bd"));
    plot(ctx, "rect_trace.svg", decomposition);
    plot(ctx, "rect_protocol.svg",
         Chart{"Rectangular modulation", "t [s]", "p", {protocol_series("p(t)", rect, "#1f77b4")}});
    return o.result.stalled ? kExitStalled : kExitOk;
}

ControlProtocol load_protocol(const std::string& path, const TimeGrid& grid, const Bounds& bounds) {
    const CsvTable table = read_csv(path);
    const std::size_t c_start = table.column("t_start");
    const std::size_t c_end = table.column("t_end");
    const std::size_t c_p = table.column("p");
    if (table.rows.size() != grid.steps()) {
        throw Error(ErrorCode::kAlignment, "protocol has " + std::to_string(table.rows.size()) +
                                               " intervals, config grid has " + std::to_string(grid.steps()));
    }
    const double tol = 1e-9 * (grid.t1() - grid.t0());
    ControlProtocol protocol{grid, std::vector<double>(grid.steps()), bounds};
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        const double t0 = std::stod(row[c_start]);
        const double t1 = std::stod(row[c_end]);
        if (std::abs(t0 - grid.time(k)) > tol || std::abs(t1 - grid.time(k + 1)) > tol) {
            throw Error(ErrorCode::kAlignment, "protocol interval " + std::to_string(k) + " does not match the grid");
        }
        protocol.values[k] = std::stod(row[c_p]);
    }
    protocol.validate();
    return protocol;
}

int cmd_simulate(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ParametricModel model = cfg.model();
    report_warnings(ctx, model);
    const TimeGrid grid = cfg.control_grid();
    const ControlProtocol protocol = ctx.protocol_path ? load_protocol(*ctx.protocol_path, grid, model.bounds())
                                                       : ControlProtocol::zeros(grid, model.bounds());
    const std::size_t trials = cfg.simulation.trials;
    if (trials < 100) {
        *ctx.err << "warning: " << trials << " trials is below the statistical floor of 100; z-scores are noisy\n";
    }
    const SimulationSetup setup = prepare_simulation(model, protocol, cfg.problem(), cfg.simulation_options());
    for (const auto& w : setup.warnings) *ctx.err << "warning: " << w << '\n';
    prepare_out_dir(ctx);
    const EnsembleStats stats = run_ensemble(setup, trials, cfg.simulation.base_seed, cfg.ocp.threads);

    CsvWriter trials_csv(path_in(ctx, "trials.csv"), cfg.hash(), {"trial", "seed", "alpha_hat", "error"});
    for (std::size_t k = 0; k < stats.results.size(); ++k) {
        const TrialResult& r = stats.results[k];
        trials_csv.row({std::to_string(k), std::to_string(r.seed), num(r.alpha_hat), num(r.alpha_hat - stats.alpha)});
    }
    trials_csv.close();

    CsvWriter csv(path_in(ctx, "ensemble.csv"), cfg.hash(),
                  {"trials", "base_seed", "alpha", "mean_error", "var_error", "theoretical_var", "relative_deviation",
                   "z_score"});
    csv.row({std::to_string(stats.trials), std::to_string(stats.base_seed), num(stats.alpha), num(stats.mean_error),
             num(stats.var_error), num(stats.theoretical_var), num(stats.var_error / stats.theoretical_var - 1.0),
             num(stats.z_score)});
    csv.close();

    *ctx.out << "trials              " << stats.trials << '\n'
             << "mean error          " << num(stats.mean_error) << '\n'
             << "sample variance     " << num(stats.var_error) << '\n'
             << "theoretical         " << num(stats.theoretical_var) << '\n'
             << "z-score             " << stats.z_score << '\n';
    return kExitOk;
}

}  // namespace kickshape::cli
