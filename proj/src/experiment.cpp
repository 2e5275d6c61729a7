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
#include "ddnpc/experiment.hpp"

#include <limits>
#include <random>

namespace ddnpc {

RunSeeds run_seeds(Seed base, std::size_t cell, std::size_t replicate) {
  return {derive_seed(base, cell, 2 * replicate), derive_seed(base, cell, 2 * replicate + 1)};
}

Matrix excitation_inputs(const Excitation& ex, int N, const Box& box, Seed seed) {
  if (ex.signal != "uniform") throw ArgumentError("excitation: unsupported signal '" + ex.signal + "'");
  require(ex.amplitude > 0.0, "excitation: amplitude must be > 0");
  const Eigen::Index m = box.dim();
  std::mt19937_64 rng(seed);
  Matrix u(N, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double center = 0.5 * (box.lower(j) + box.upper(j));
    const double lo = std::max(box.lower(j), center - ex.amplitude);
    const double hi = std::min(box.upper(j), center + ex.amplitude);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int k = 0; k < N; ++k) u(k, j) = dist(rng);
  }
  return u;
}

DataBundle collect_data(const ExperimentConfig& cfg, double w_star, Seed noise_seed) {
  const PlantModel& p = cfg.plant_model();
  const Box box = cfg.input_box ? *cfg.input_box : p.input_box();
  const Vector x0 = Vector::Zero(p.n());
  DataBundle b;
  b.clean = p.simulate(x0, excitation_inputs(cfg.excitation, cfg.N, box, cfg.excitation.seed));
  b.clean.seed = cfg.excitation.seed;
  b.validation = p.simulate(x0, excitation_inputs(cfg.excitation, cfg.validation_N, box, cfg.excitation.seed + 1));
  b.data = add_noise(b.clean, w_star, noise_seed);
  return b;
}

PeCertificate data_certificate(const ExperimentConfig& cfg, const Dictionary& dict, const Trajectory& data) {
  const int order = cfg.L + data.d_max() + data.n();
  if (order > data.length())
    throw ArgumentError("certificate: N = " + std::to_string(data.length()) + " is shorter than the order " +
                        std::to_string(order));
  const int N = data.length();
  return data_excitation(dict.evaluate_sequence(data, 0, N), lift_sequence(data, 0, N), order);
}

nlohmann::json to_json(const PeCertificate& c, int order) {
  return {{"order", order},         {"satisfied", c.satisfied}, {"rank", c.rank},          {"rows", c.rows},
          {"cols", c.cols},         {"sigma_max", c.sigma_max}, {"sigma_min", c.sigma_min}};
}

DictionaryConstants fit_constants(const ExperimentConfig& cfg, const Dictionary& dict, const DataBundle& bundle,
                                  double w_star, const EpsSetting& eps) {
  const PlantModel& p = cfg.plant_model();
  VectorField phi;
  if (p.has_phi()) phi = [&p](const Vector& u, const Vector& xi) { return p.true_phi(u, xi); };
  DictionaryConstants c =
      estimate_constants(dict, bundle.data, bundle.clean, bundle.validation, w_star, cfg.L, phi, cfg.estimation);
  if (eps.value) {
    c.eps_star = *eps.value;
    c.notes.push_back("eps* overridden by configuration");
  }
  return c;
}

ClosedLoopRecord run_experiment(const ExperimentConfig& cfg, const Dictionary& dict,
                                const DictionaryConstants& constants, const Trajectory& data, double w_star,
                                Seed loop_seed) {
  const PlantModel& p = cfg.plant_model();
  ClosedLoopOptions opts;
  opts.c3 = cfg.c3;
  return run_closed_loop(p, dict, constants, data, cfg.npc_config(), cfg.initial_state(), w_star, loop_seed,
                         cfg.n_steps, opts);
}

SweepOutput run_sweep(const ExperimentConfig& cfg, bool parallel) {
  if (cfg.w_star_grid.empty() || cfg.eps_star_grid.empty()) throw ArgumentError("sweep: empty grid");
  const Dictionary dict = cfg.make_dictionary();
  struct Cell {
    EpsSetting eps;
    double w;
  };
  std::vector<Cell> grid;
  for (const auto& e : cfg.eps_star_grid)
    for (double w : cfg.w_star_grid) grid.push_back({e, w});

  std::vector<SweepTask> tasks;
  for (std::size_t c = 0; c < grid.size(); ++c)
    for (int r = 0; r < cfg.seeds; ++r) tasks.push_back({c, static_cast<Seed>(r)});

  const auto fn = [&](const SweepTask& task) {
    const Cell& cell = grid[task.cell];
    const RunSeeds seeds = run_seeds(cfg.seed, task.cell, task.seed);
    const DataBundle bundle = collect_data(cfg, cell.w, seeds.data_noise);
    const DictionaryConstants constants = fit_constants(cfg, dict, bundle, cell.w, cell.eps);
    return run_experiment(cfg, dict, constants, bundle.data, cell.w, seeds.loop);
  };
  std::vector<ClosedLoopRecord> records = parallel ? run_tasks_parallel(tasks, fn) : run_tasks_serial(tasks, fn);

  SweepOutput out;
  out.cells.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    out.cells[c].w_star = grid[c].w;
    out.cells[c].eps_star = grid[c].eps.value.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) out.cells[tasks[t].cell].runs.push_back(std::move(records[t]));
  // Estimated eps* cells report the value the runs used.
  for (std::size_t c = 0; c < grid.size(); ++c)
    if (grid[c].eps.estimate() && !out.cells[c].runs.empty() && !out.cells[c].runs.front().steps.empty())
      out.cells[c].eps_star = out.cells[c].runs.front().eps_star;
  out.report = estimate_beta(out.cells, std::min(5, cfg.seeds));
  return out;
}

}  // namespace ddnpc
