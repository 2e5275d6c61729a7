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
// Command-line driver: collect, fit, run, sweep and verify-bound.

#include "ddnpc/commands.hpp"
#include "ddnpc/parallel.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Data-driven robust nonlinear predictive control experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const ddnpc::ExperimentConfig&, std::ostream&);
  };
  const Sub subs[] = {
      {"collect", "Generate excitation data, its noisy copy and the excitation certificate", ddnpc::cmd_collect},
      {"fit", "Fit the coefficient matrix and estimate the controller constants", ddnpc::cmd_fit},
      {"run", "Run one closed-loop experiment on the collected data", ddnpc::cmd_run},
      {"sweep", "Run the (eps*, w*) x seeds grid and write the stability report", ddnpc::cmd_sweep},
      {"verify-bound", "Re-check the output deviation bound on a stored run", ddnpc::cmd_verify_bound},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Base seed (overrides seed)");
    sub->add_option("--jobs", jobs, "Worker threads for parallel kernels and sweeps")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ddnpc::kExitConfig;
  }

  try {
    ddnpc::ExperimentConfig cfg = ddnpc::load_config(config_path);
    if (out) cfg.output_dir = *out;
    if (seed) cfg.seed = *seed;
    if (jobs > 0) ddnpc::set_threads(jobs);
    for (const auto& s : subs)
      if (app.got_subcommand(s.name)) return s.fn(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ddnpc::exit_code_for(e);
  }
  return ddnpc::kExitFailure;
}
