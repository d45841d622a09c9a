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


#include "config.hpp"

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kickshape/error.hpp"

namespace kickshape::cli {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::kConfig, message); }

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trimmed(raw);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        config_error("key '" + key + "': '" + raw + "' is not a finite number");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& raw) {
    const std::string s = trimmed(raw);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
        config_error("key '" + key + "': '" + raw + "' is not a non-negative integer");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
    const std::string s = trimmed(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    config_error("key '" + key + "': '" + raw + "' is not a boolean");
}

// Section -> (key -> raw value). Rejects sections and keys outside `allowed`.
using Raw = std::map<std::string, std::map<std::string, std::string>>;

Raw flatten(const pt::ptree& tree, const std::map<std::string, std::set<std::string>>& allowed) {
    Raw raw;
    for (const auto& [section, body] : tree) {
        const auto it = allowed.find(section);
        if (it == allowed.end()) config_error("unknown section [" + section + "]");
        if (body.empty() && !body.data().empty()) config_error("key '" + section + "' outside any section");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) config_error("unknown key '" + key + "' in [" + section + "]");
            raw[section][key] = value.data();
        }
    }
    return raw;
}

const std::map<std::string, std::set<std::string>> kCommonKeys = {
    {"system", {"type", "Omega0", "Gamma", "mass", "p_min", "p_max"}},
    {"grid", {"periods_before_tp", "periods_after_tp", "steps_per_period", "control_stride"}},
    {"ocp", {"gamma_reg", "max_iters", "grad_tol", "fd_step"}},
    {"simulation", {"trials", "base_seed", "alpha"}},
    {"output", {"directory", "emit_plots"}},
};

void fmt(std::ostringstream& os, const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << key << '=' << buf << '\n';
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        config_error(std::string("malformed config: ") + e.what());
    }

    const std::string type = trimmed(tree.get<std::string>("system.type", ""));
    RunConfig cfg;
    auto allowed = kCommonKeys;
    if (type == "nems") {
        cfg.system = SystemType::kNems;
        allowed["system"].insert({"temperature", "S_f", "S_m"});
    } else if (type == "particle") {
        cfg.system = SystemType::kParticle;
        allowed["system"].insert({"kappa0", "eta_hom"});
    } else {
        config_error("[system] type must be 'nems' or 'particle'");
    }
    Raw raw = flatten(tree, allowed);

    auto get = [&](const char* section, const char* key) -> const std::string* {
        auto s = raw.find(section);
        if (s == raw.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto require = [&](const char* section, const char* key) -> double {
        const std::string* v = get(section, key);
        if (!v) config_error(std::string("missing key '") + key + "' in [" + section + "]");
        return to_double(key, *v);
    };
    auto number = [&](const char* section, const char* key, double& out) {
        if (const std::string* v = get(section, key)) out = to_double(key, *v);
    };
    auto count = [&](const char* section, const char* key, auto& out) {
        if (const std::string* v = get(section, key)) out = static_cast<std::decay_t<decltype(out)>>(to_unsigned(key, *v));
    };

    Bounds bounds;
    number("system", "p_min", bounds.lower);
    number("system", "p_max", bounds.upper);
    if (cfg.system == SystemType::kNems) {
        NemsParams& p = cfg.nems;
        p.omega0 = require("system", "Omega0");
        p.gamma = require("system", "Gamma");
        p.mass = require("system", "mass");
        p.temperature = require("system", "temperature");
        p.measurement_psd = require("system", "S_m");
        p.force_psd = get("system", "S_f") ? require("system", "S_f")
                                           : thermal_force_psd(p.mass, p.gamma, p.temperature);
        p.bounds = bounds;
        p.validate();
    } else {
        ParticleParams& p = cfg.particle;
        p.omega0 = require("system", "Omega0");
        p.gamma = require("system", "Gamma");
        p.kappa0 = require("system", "kappa0");
        p.eta_hom = require("system", "eta_hom");
        number("system", "mass", p.mass);
        p.bounds = bounds;
        p.validate();
    }

    GridSettings& g = cfg.grid;
    number("grid", "periods_before_tp", g.periods_before_tp);
    number("grid", "periods_after_tp", g.periods_after_tp);
    count("grid", "steps_per_period", g.steps_per_period);
    count("grid", "control_stride", g.control_stride);
    if (!(g.periods_before_tp > 0.0) || !(g.periods_after_tp > 0.0)) {
        config_error("[grid] periods_before_tp and periods_after_tp must be positive");
    }
    if (g.steps_per_period == 0 || g.control_stride == 0) {
        config_error("[grid] steps_per_period and control_stride must be positive");
    }

    if (const std::string* v = get("ocp", "gamma_reg"); v && trimmed(*v) != "auto") {
        cfg.ocp.gamma_reg = to_double("gamma_reg", *v);
    }
    count("ocp", "max_iters", cfg.ocp.max_iters);
    number("ocp", "grad_tol", cfg.ocp.grad_tol);
    number("ocp", "fd_step", cfg.ocp.fd_step);
    cfg.ocp.control_stride = g.control_stride;
    try {
        cfg.ocp.validate();
    } catch (const Error& e) {
        config_error(std::string("[ocp] ") + e.what());
    }

    count("simulation", "trials", cfg.simulation.trials);
    count("simulation", "base_seed", cfg.simulation.base_seed);
    number("simulation", "alpha", cfg.simulation.alpha);
    if (cfg.simulation.trials < 2) config_error("[simulation] trials must be at least 2");

    if (const std::string* v = get("output", "directory")) cfg.output.directory = trimmed(*v);
    if (const std::string* v = get("output", "emit_plots")) cfg.output.emit_plots = to_bool("emit_plots", *v);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    if (system == SystemType::kNems) {
        os << "system.type=nems\n";
        fmt(os, "system.Omega0", nems.omega0);
        fmt(os, "system.Gamma", nems.gamma);
        fmt(os, "system.mass", nems.mass);
        fmt(os, "system.temperature", nems.temperature);
        fmt(os, "system.S_f", nems.force_psd);
        fmt(os, "system.S_m", nems.measurement_psd);
        fmt(os, "system.p_min", nems.bounds.lower);
        fmt(os, "system.p_max", nems.bounds.upper);
    } else {
        os << "system.type=particle\n";
        fmt(os, "system.Omega0", particle.omega0);
        fmt(os, "system.Gamma", particle.gamma);
        fmt(os, "system.kappa0", particle.kappa0);
        fmt(os, "system.eta_hom", particle.eta_hom);
        fmt(os, "system.mass", particle.mass);
        fmt(os, "system.p_min", particle.bounds.lower);
        fmt(os, "system.p_max", particle.bounds.upper);
    }
    fmt(os, "grid.periods_before_tp", grid.periods_before_tp);
    fmt(os, "grid.periods_after_tp", grid.periods_after_tp);
    os << "grid.steps_per_period=" << grid.steps_per_period << '\n';
    os << "grid.control_stride=" << grid.control_stride << '\n';
    if (ocp.gamma_reg) fmt(os, "ocp.gamma_reg", *ocp.gamma_reg);
    else os << "ocp.gamma_reg=auto\n";
    os << "ocp.max_iters=" << ocp.max_iters << '\n';
    fmt(os, "ocp.grad_tol", ocp.grad_tol);
    fmt(os, "ocp.fd_step", ocp.fd_step);
    os << "simulation.trials=" << simulation.trials << '\n';
    os << "simulation.base_seed=" << simulation.base_seed << '\n';
    fmt(os, "simulation.alpha", simulation.alpha);
    return os.str();
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

ParametricModel RunConfig::model() const {
    return system == SystemType::kNems ? nems_model(nems) : particle_model(particle);
}

ImpulseProblem RunConfig::problem() const {
    const double period = model().reference_period();
    return ImpulseProblem::momentum_kick(grid.periods_before_tp * period,
                                         (grid.periods_before_tp + grid.periods_after_tp) * period,
                                         simulation.alpha);
}

TimeGrid RunConfig::control_grid() const {
    return make_control_grid(model(), problem(), grid.steps_per_period, grid.control_stride);
}

SimulationOptions RunConfig::simulation_options() const {
    SimulationOptions opts;
    opts.control_stride = grid.control_stride;
    opts.steady_state = ocp.steady_state;
    opts.threads = ocp.threads;
    return opts;
}

}  // namespace kickshape::cli
