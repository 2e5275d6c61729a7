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

#include "ddnpc/config.hpp"
#include "ddnpc/experiment.hpp"
#include "ddnpc/io.hpp"

#include <filesystem>
#include <limits>
#include <random>

using namespace ddnpc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddnpc_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("shortest decimal form round-trips") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("trajectory CSV round trip") {
  const fs::path dir = scratch("traj");
  ExperimentConfig cfg;
  cfg.plant = "P3";
  cfg.N = 150;
  cfg.x0 = {0, 0, 0};
  cfg.Q = {1, 1};
  cfg.R = {1, 1};
  const DataBundle b = collect_data(cfg, 1e-3, 3);
  write_trajectory(dir / "t.csv", b.data);
  const Trajectory back = read_trajectory(dir / "t.csv", {2, 1});
  CHECK(back.u == b.data.u);
  REQUIRE(back.y.size() == 2);
  CHECK(back.y[0] == b.data.y[0]);
  CHECK(back.y[1] == b.data.y[1]);
  CHECK(back.y[0].size() == 152);
  CHECK(back.y[1].size() == 151);
  CHECK_THROWS_AS(read_trajectory(dir / "missing.csv", {2, 1}), IoError);
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig c;
  c.plant = "LTI";
  c.N = 77;
  c.L = 5;
  c.w_star_grid = {0.0, 0.25};
  c.eps_star_grid = {EpsSetting{}, EpsSetting{0.5}};
  c.eps_star = EpsSetting{1e-3};
  c.input_box = Box::symmetric(1, 2.0);
  c.seed = 1234567890123ULL;
  c.excitation.amplitude = 0.7;
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.eps_star.value == 1e-3);
  CHECK(back.eps_star_grid[0].estimate());
  CHECK(back.input_box->upper(0) == 2.0);

  const fs::path dir = scratch("cfg");
  write_json(dir / "c.json", to_json(c));
  CHECK(to_json(load_config(dir / "c.json")) == to_json(c));
}

TEST_CASE("config errors") {
  nlohmann::json j = to_json(ExperimentConfig{});
  j["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = to_json(ExperimentConfig{});
  j["schema_version"] = 99;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = to_json(ExperimentConfig{});
  j["L"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = to_json(ExperimentConfig{});
  j["N"] = 20;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = to_json(ExperimentConfig{});
  j["w_star_grid"] = nlohmann::json::array();
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = to_json(ExperimentConfig{});
  j["plant"] = "nope";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("record CSV layout") {
  ExperimentConfig cfg;
  cfg.n_steps = 8;
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const DictionaryConstants c = fit_constants(cfg, dict, b, 0.0, EpsSetting{});
  const ClosedLoopRecord rec = run_experiment(cfg, dict, c, b.data, 0.0, 0);
  const std::string csv = record_csv(rec);
  CHECK(csv.rfind("t,xi_norm,J,V,alpha_l1,sigma_inf,feasible,lemma1_min_margin,solve_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(rec.steps.size()));

  // Stored solves read back with the inputs and outputs that were logged.
  const fs::path dir = scratch("dump");
  write_solution_dump(dir / "s.csv", rec);
  write_solve_states(dir / "x.csv", rec);
  const auto solves = read_stored_solves(dir / "s.csv", dir / "x.csv", {2});
  REQUIRE(solves.size() == rec.steps.size());
  for (std::size_t s = 0; s < solves.size(); ++s) {
    CHECK(solves[s].t == rec.steps[s].t);
    CHECK(solves[s].x == rec.steps[s].x);
    CHECK(solves[s].solution.u_bar == rec.steps[s].solution.u_bar);
    CHECK(solves[s].solution.y_bar[0] == rec.steps[s].solution.y_bar[0]);
  }
}

TEST_CASE("atomic writes leave no temporary behind") {
  const fs::path dir = scratch("atomic");
  write_text_atomic(dir / "a.txt", "one");
  write_text_atomic(dir / "a.txt", "two");
  CHECK(read_text(dir / "a.txt") == "two");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  // A regular file where a directory is needed.
  CHECK_THROWS_AS(write_text_atomic(dir / "a.txt" / "b.txt", "x"), IoError);
}
