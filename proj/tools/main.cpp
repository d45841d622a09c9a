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


#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "version.hpp"

using namespace kickshape::cli;

int main(int argc, char** argv) {
    CLI::App app{"Modulation protocols for impulse estimation in monitored oscillators", "kickshape"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string protocol_path;

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const Context&);
    };
    const Command commands[] = {
        {"steady-state", "Steady-state covariances and the unmodulated impulse uncertainty", cmd_steady_state},
        {"optimize", "Optimize the modulation protocol starting from p = 0", cmd_optimize},
        {"compare", "Rectangular 2*Omega0 modulation against the optimized protocol", cmd_compare},
        {"simulate", "Monte Carlo ensemble of impulse estimates", cmd_simulate},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides KICKSHAPE_OUT_DIR and the config)");
        sub->add_option("--seed", seed, "Base seed for simulation trials");
        if (std::string(c.name) == "simulate") {
            sub->add_option("--protocol", protocol_path, "protocol.csv to simulate instead of p = 0")
                ->check(CLI::ExistingFile);
        }
        subs.emplace_back(sub, &c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    for (const auto& [sub, command] : subs) {
        if (!sub->parsed()) continue;
        return guarded(std::cerr, [&] {
            Context ctx;
            ctx.config = load_config(config_path);
            if (seed) ctx.config.simulation.base_seed = *seed;
            ctx.out_dir = resolve_out_dir(out_dir.empty() ? std::nullopt : std::optional(out_dir), ctx.config);
            if (!protocol_path.empty()) ctx.protocol_path = protocol_path;
            ctx.out = &std::cout;
            ctx.err = &std::cerr;
            return command->run(ctx);
        });
    }
    return kExitValidation;
}
