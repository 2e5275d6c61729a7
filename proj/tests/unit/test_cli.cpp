/*
 Copyright 2026 The ddnpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "doctest.h"

#include "ddnpc/commands.hpp"
#include "ddnpc/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

using namespace ddnpc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddnpc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DDNPC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const fs::path& dir, const ExperimentConfig& cfg) {
  const fs::path p = dir / "config.in.json";
  write_json(p, to_json(cfg));
  return p;
}

// Drops the trailing solve_ms column of every record row.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

}  // namespace

TEST_CASE("pipeline exit codes") {
  const fs::path dir = scratch("pipeline");
  ExperimentConfig cfg;
  cfg.output_dir = dir.string();
  cfg.n_steps = 20;
  cfg.w_star = 1e-3;
  const std::string conf = "--config " + write_config(dir, cfg).string();
  CHECK(cli("collect " + conf) == 0);
  CHECK(cli("fit " + conf) == 0);
  CHECK(cli("run " + conf) == 0);
  CHECK(cli("verify-bound " + conf) == 0);
  for (const char* f : {files::kData, files::kCertificate, files::kConstants, files::kRecord, files::kSummary,
                        files::kLemma})
    CHECK(fs::exists(dir / f));
  CHECK(read_json(dir / files::kCertificate)["satisfied"] == true);
}

TEST_CASE("argument and configuration errors exit with 2") {
  const fs::path dir = scratch("badcfg");
  CHECK(cli("") == 2);
  CHECK(cli("run") == 2);
  CHECK(cli("frobnicate --config x.json") == 2);
  write_text_atomic(dir / "bad.json", R"({"schema_version": 1, "L": 1})");
  CHECK(cli("collect --config " + (dir / "bad.json").string()) == 2);
  write_text_atomic(dir / "garbled.json", "{ not json");
  CHECK(cli("collect --config " + (dir / "garbled.json").string()) == 2);
}

TEST_CASE("missing data exits with 1, a missing config with 2") {
  const fs::path dir = scratch("missing");
  ExperimentConfig cfg;
  cfg.output_dir = (dir / "empty").string();
  CHECK(cli("fit --config " + write_config(dir, cfg).string()) == 1);
  CHECK(cli("collect --config " + (dir / "nope.json").string()) == 2);
}

TEST_CASE("an input box that excludes the stabilizing input halts with 3") {
  const fs::path dir = scratch("tinybox");
  ExperimentConfig cfg;
  cfg.output_dir = dir.string();
  cfg.input_box = Box::symmetric(1, 0.01);
  cfg.x0 = {3.0, 0.0};
  cfg.n_steps = 20;
  const std::string conf = "--config " + write_config(dir, cfg).string();
  REQUIRE(cli("collect " + conf) == 0);
  REQUIRE(cli("fit " + conf) == 0);
  CHECK(cli("run " + conf) == 3);
  const auto summary = read_json(dir / files::kSummary);
  CHECK(summary["halted"] == true);
}

TEST_CASE("single-cell sweep reproduces the run") {
  const fs::path dir = scratch("single");
  ExperimentConfig cfg;
  cfg.output_dir = dir.string();
  cfg.n_steps = 24;
  cfg.w_star = 1e-3;
  cfg.w_star_grid = {1e-3};
  cfg.seeds = 1;
  std::ostringstream log;
  REQUIRE(cmd_collect(cfg, log) == 0);
  REQUIRE(cmd_fit(cfg, log) == 0);
  REQUIRE(cmd_run(cfg, log) == 0);
  REQUIRE(cmd_sweep(cfg, log) == 0);
  const std::string run = without_timing(read_text(dir / files::kRecord));
  const std::string sweep = without_timing(read_text(dir / "cell_0_seed_0.csv"));
  CHECK(run == sweep);
  CHECK(read_json(dir / files::kReport)["cells"].size() == 1);
}

TEST_CASE("exception mapping") {
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(NumericalError("x")) == kExitNumerical);
  CHECK(exit_code_for(IoError("x")) == kExitFailure);
}

TEST_CASE("a diverging excitation run exits with 4") {
  const fs::path dir = scratch("diverge");
  ExperimentConfig cfg;
  cfg.output_dir = dir.string();
  cfg.excitation.amplitude = 2.0;
  CHECK(cli("collect --config " + write_config(dir, cfg).string()) == 4);
}
