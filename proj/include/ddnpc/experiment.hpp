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

// Experiment pipeline behind the driver subcommands: data collection,
// constant fitting, single runs and the (eps*, w*) x seeds sweep.

#include "ddnpc/closedloop.hpp"
#include "ddnpc/config.hpp"
#include "ddnpc/lifting.hpp"

#include "json.hpp"

namespace ddnpc {

struct DataBundle {
  /// Noise-free excitation run.
  Trajectory clean;
  /// What the controller gets: `clean` with measurement noise (identical when w* = 0).
  Trajectory data;
  /// Independent noise-free run for the eps* estimate.
  Trajectory validation;
};

/// Seeds of one replicate: data noise and closed-loop measurement noise.
struct RunSeeds {
  Seed data_noise = 0;
  Seed loop = 0;
};
RunSeeds run_seeds(Seed base, std::size_t cell, std::size_t replicate);

/// i.i.d. uniform inputs, N x m, in the amplitude sub-box of `box`.
Matrix excitation_inputs(const Excitation& ex, int N, const Box& box, Seed seed);

DataBundle collect_data(const ExperimentConfig& cfg, double w_star, Seed noise_seed);

/// Excitation certificate of order L + d_max + n on the controller's data.
PeCertificate data_certificate(const ExperimentConfig& cfg, const Dictionary& dict, const Trajectory& data);
nlohmann::json to_json(const PeCertificate& c, int order);

DictionaryConstants fit_constants(const ExperimentConfig& cfg, const Dictionary& dict, const DataBundle& bundle,
                                  double w_star, const EpsSetting& eps);

ClosedLoopRecord run_experiment(const ExperimentConfig& cfg, const Dictionary& dict,
                                const DictionaryConstants& constants, const Trajectory& data, double w_star,
                                Seed loop_seed);

struct SweepOutput {
  std::vector<SweepCellResult> cells;
  StabilityReport report;
};

/// Grid order: eps_star_grid outer, w_star_grid inner; `parallel` selects the OpenMP task runner.
SweepOutput run_sweep(const ExperimentConfig& cfg, bool parallel = true);

}  // namespace ddnpc
