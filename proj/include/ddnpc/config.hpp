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
#pragma once

// Experiment configuration: a versioned JSON document shared by all
// subcommands of the driver.

#include "ddnpc/common.hpp"
#include "ddnpc/constants.hpp"
#include "ddnpc/dictionary.hpp"
#include "ddnpc/npc.hpp"
#include "ddnpc/plant.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddnpc {

inline constexpr int kConfigSchemaVersion = 1;

struct Excitation {
  /// Half-width of the uniform input sub-box around the center of the input box.
  double amplitude = 0.2;
  Seed seed = 1;
  std::string signal = "uniform";
};

/// eps* either estimated from validation data or fixed by the user.
struct EpsSetting {
  std::optional<double> value;
  [[nodiscard]] bool estimate() const { return !value.has_value(); }
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string plant = "P1";
  /// "default" or a dictionary descriptor.
  nlohmann::json dictionary = "default";
  int N = 120;
  int validation_N = 200;
  Excitation excitation;
  int L = 6;
  double lambda_alpha = 1e3;
  double lambda_sigma = 1e3;
  std::vector<double> Q{1.0};
  std::vector<double> R{1.0};
  /// Input box override; empty means the plant's own box.
  std::optional<Box> input_box;
  double w_star = 0.0;
  std::vector<double> w_star_grid{0.0, 1e-3, 1e-2};
  EpsSetting eps_star;
  std::vector<EpsSetting> eps_star_grid{EpsSetting{}};
  std::vector<double> x0{0.5, 0.0};
  int n_steps = 40;
  int seeds = 20;
  Seed seed = 1;
  double c3 = 1.0;
  EstimationOptions estimation;
  std::string output_dir = "out";

  /// Throws ConfigError on any inconsistency with the selected plant.
  void validate() const;

  [[nodiscard]] const PlantModel& plant_model() const;
  [[nodiscard]] Dictionary make_dictionary() const;
  [[nodiscard]] NpcConfig npc_config() const;
  [[nodiscard]] Vector initial_state() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Parses and validates. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ddnpc
