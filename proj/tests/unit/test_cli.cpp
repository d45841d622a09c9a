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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "kickshape/error.hpp"

namespace kickshape::cli {
namespace {

namespace fs = std::filesystem;

const char* kSmallNems = R"(
[system]
type = nems
Omega0 = 211743.34485195205
Gamma = 2.07
mass = 2.8e-12
temperature = 295
S_f = 5.3e-31
S_m = 4e-28

[grid]
periods_before_tp = 3
periods_after_tp = 3
steps_per_period = 40
control_stride = 4

[ocp]
max_iters = 4

[simulation]
trials = 12
base_seed = 5
alpha = 2

[output]
directory = unused
emit_plots = true
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kickshape_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args, const fs::path& out_env = {}) {
    std::string cmd;
    if (!out_env.empty()) cmd = "KICKSHAPE_OUT_DIR='" + out_env.string() + "' ";
    cmd += std::string("'") + KICKSHAPE_CLI_PATH + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, ParsesShippedShape) {
    const RunConfig c = parse_config(kSmallNems);
    EXPECT_EQ(c.system, SystemType::kNems);
    EXPECT_EQ(c.grid.steps_per_period, 40u);
    EXPECT_EQ(c.simulation.trials, 12u);
    EXPECT_FALSE(c.ocp.gamma_reg.has_value());
    EXPECT_TRUE(c.output.emit_plots);
    EXPECT_EQ(c.control_grid().steps(), 60u);
    EXPECT_NEAR(c.problem().t_p / c.model().reference_period(), 3.0, 1e-12);
}

TEST(Config, RejectsUnknownKeysAndSections) {
    for (const std::string extra : {"[grid]\nstep = 3\n", "[extras]\nx = 1\n", "[system]\nkappa0 = 1\n"}) {
        try {
            parse_config(std::string(kSmallNems) + extra);
            FAIL() << extra;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::kConfig) << extra;
        }
    }
}

TEST(Config, RejectsMalformedValues) {
    std::string text = kSmallNems;
    text.replace(text.find("trials = 12"), 11, "trials = x");
    EXPECT_THROW(parse_config(text), Error);
    text = kSmallNems;
    text.replace(text.find("Gamma = 2.07"), 12, "Gamma = -1");
    EXPECT_THROW(parse_config(text), Error);
}

TEST(Config, HashIsStableAndSensitive) {
    const RunConfig a = parse_config(kSmallNems);
    const RunConfig b = parse_config(kSmallNems);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    RunConfig c = a;
    c.simulation.base_seed = 6;
    EXPECT_NE(a.hash(), c.hash());
    c = a;
    c.output.directory = "elsewhere";
    EXPECT_EQ(a.hash(), c.hash());
}

TEST(Csv, RoundTripsFullPrecision) {
    const fs::path dir = scratch("csv");
    const std::string path = (dir / "t.csv").string();
    const double x = 0.1 + 0.2;
    {
        CsvWriter w(path, "abc", {"a", "b"});
        w.row(std::vector<double>{x, -1e-300});
        w.close();
    }
    const CsvTable t = read_csv(path);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(std::stod(t.rows[0][t.column("a")]), x);
    EXPECT_EQ(std::stod(t.rows[0][t.column("b")]), -1e-300);
    EXPECT_EQ(slurp(path).rfind("#", 0), 0u);
    EXPECT_THROW(t.column("c"), Error);
}

TEST(Protocol, LoadChecksAlignment) {
    const fs::path dir = scratch("protocol");
    const TimeGrid grid(0.0, 1.0, 4);
    const std::string path = (dir / "p.csv").string();
    {
        CsvWriter w(path, "h", {"t_start", "t_end", "p"});
        for (std::size_t k = 0; k < 4; ++k) w.row(std::vector<double>{grid.time(k), grid.time(k + 1), 0.1 * k});
        w.close();
    }
    const ControlProtocol p = load_protocol(path, grid, Bounds{});
    EXPECT_EQ(p.values[3], 0.1 * 3);
    EXPECT_THROW(load_protocol(path, TimeGrid(0.0, 1.0, 5), Bounds{}), Error);
    EXPECT_THROW(load_protocol(path, TimeGrid(0.0, 2.0, 4), Bounds{}), Error);
    EXPECT_THROW(load_protocol(path, grid, Bounds{-0.1, 0.1}), Error);
}

TEST(OutDir, Precedence) {
    RunConfig c = parse_config(kSmallNems);
    EXPECT_EQ(resolve_out_dir(std::string("flag"), c), "flag");
    ::setenv("KICKSHAPE_OUT_DIR", "env", 1);
    EXPECT_EQ(resolve_out_dir(std::nullopt, c), "env");
    ::unsetenv("KICKSHAPE_OUT_DIR");
    EXPECT_EQ(resolve_out_dir(std::nullopt, c), "unused");
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch("exit");
    const std::string good = write_file(dir / "good.ini", kSmallNems);
    std::string bad = kSmallNems;
    bad.replace(bad.find("Gamma = 2.07"), 12, "Gamma = -1");
    const std::string invalid = write_file(dir / "bad.ini", bad);
    const std::string unknown = write_file(dir / "unknown.ini", std::string(kSmallNems) + "[ocp]\nfoo = 1\n");

    EXPECT_EQ(run("steady-state --config '" + good + "'", dir / "ss"), 0);
    EXPECT_TRUE(fs::exists(dir / "ss" / "steady_state.csv"));
    EXPECT_EQ(run("steady-state --config '" + invalid + "'", dir / "x"), 2);
    EXPECT_EQ(run("steady-state --config '" + unknown + "'", dir / "x"), 2);
    EXPECT_EQ(run("frobnicate", dir / "x"), 2);
    EXPECT_EQ(run("optimize", dir / "x"), 2);
}

TEST(Binary, OptimizeThenSimulateIsDeterministic) {
    const fs::path dir = scratch("pipeline");
    const std::string cfg = write_file(dir / "c.ini", kSmallNems);
    ASSERT_EQ(run("optimize --config '" + cfg + "' --out '" + (dir / "a").string() + "'"), 0);
    ASSERT_EQ(run("optimize --config '" + cfg + "'", dir / "b"), 0);
    for (const char* f : {"protocol.csv", "uncertainty_trace.csv", "summary.csv"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    EXPECT_TRUE(fs::exists(dir / "a" / "protocol.svg") || fs::exists(dir / "a" / "uncertainty_trace.svg"));

    const std::string proto = (dir / "a" / "protocol.csv").string();
    ASSERT_EQ(run("simulate --config '" + cfg + "' --protocol '" + proto + "'", dir / "s1"), 0);
    ASSERT_EQ(run("simulate --config '" + cfg + "' --protocol '" + proto + "'", dir / "s2"), 0);
    EXPECT_EQ(slurp(dir / "s1" / "trials.csv"), slurp(dir / "s2" / "trials.csv"));
    ASSERT_EQ(run("simulate --config '" + cfg + "' --seed 9", dir / "s3"), 0);
    EXPECT_NE(slurp(dir / "s1" / "trials.csv"), slurp(dir / "s3" / "trials.csv"));

    const CsvTable trials = read_csv((dir / "s1" / "trials.csv").string());
    EXPECT_EQ(trials.rows.size(), 12u);
    const CsvTable ens = read_csv((dir / "s1" / "ensemble.csv").string());
    EXPECT_EQ(ens.rows.size(), 1u);
}

TEST(Binary, CompareWritesBothProtocols) {
    const fs::path dir = scratch("compare");
    const std::string cfg = write_file(dir / "c.ini", kSmallNems);
    ASSERT_EQ(run("compare --config '" + cfg + "'", dir / "o"), 0);
    for (const char* f : {"rect_protocol.csv", "rect_trace.csv", "compare.csv", "protocol.csv"}) {
        EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
    }
}

}  // namespace
}  // namespace kickshape::cli
