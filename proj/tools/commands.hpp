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

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace kickshape::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitDivergence = 3,
    kExitStalled = 4,
};

struct Context {
    RunConfig config;
    std::string out_dir;
    std::optional<std::string> protocol_path;
    std::ostream* out = nullptr;  // report
    std::ostream* err = nullptr;  // warnings
};

/// Output directory precedence: --out, then $KICKSHAPE_OUT_DIR, then the
/// config's [output] directory.
std::string resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config);

int cmd_steady_state(const Context& ctx);
int cmd_optimize(const Context& ctx);
int cmd_compare(const Context& ctx);
int cmd_simulate(const Context& ctx);

/// Runs `fn`, mapping library errors onto exit codes and printing the
/// message to `err`.
int guarded(std::ostream& err, const std::function<int()>& fn);

/// Loads a protocol.csv written by `optimize` and checks it against `grid`.
ControlProtocol load_protocol(const std::string& path, const TimeGrid& grid, const Bounds& bounds);

}  // namespace kickshape::cli
