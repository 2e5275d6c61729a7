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

// Receding-horizon loop around the robust controller, the online check of the
// open-loop deviation bound and the practical-stability summary of a sweep.

#include "ddnpc/common.hpp"
#include "ddnpc/npc.hpp"
#include "ddnpc/plant.hpp"

#include "json.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace ddnpc {

/// 1 + K + ... + K^k.
double poly_p(int k, double K);

/// Deviation bound for output i at prediction index k.
double lemma1_bound(int k, int d_i, int d_max, const DictionaryConstants& constants, double w_star,
                    double alpha_l1, double sigma_inf, double g_inf_norm);

struct DeviationCheck {
  int channel = 0;
  int k = 0;
  double measured = 0.0;
  double bound = 0.0;
  [[nodiscard]] double margin() const { return bound - measured; }
};

struct StepRecord {
  /// Plant time of the solve.
  int t = 0;
  /// True state at t.
  Vector x;
  /// Lifted state of the noise-free plant and the one assembled from measurements.
  Vector xi_clean;
  Vector xi_measured;
  /// The d_max inputs applied after this solve (rows).
  Matrix applied;
  double J = 0.0;
  double V = 0.0;
  double alpha_l1 = 0.0;
  double alpha_l2 = 0.0;
  double sigma_inf = 0.0;
  bool feasible = false;
  NpcStatus status = NpcStatus::NumericalFailure;
  int sqp_iters = 0;
  double solve_ms = 0.0;
  std::vector<DeviationCheck> lemma1;
  /// Same bound against the response started from the measured window (see verify_lemma1_window).
  std::vector<DeviationCheck> lemma1_window;
  NpcSolution solution;

  /// NaN when no checks were run.
  [[nodiscard]] double lemma1_min_margin() const;
  [[nodiscard]] double lemma1_window_min_margin() const;
};

struct ClosedLoopRecord {
  std::vector<int> d;
  int L = 0;
  double w_star = 0.0;
  /// eps* the controller's constants carried.
  double eps_star = 0.0;
  double c3 = 1.0;
  Seed seed = 0;
  std::vector<StepRecord> steps;
  /// Every plant state visited, x_0 .. x_T (rows).
  Matrix states;
  /// Every input applied including the warm-up (rows).
  Matrix inputs;
  /// Measured outputs y_0 .. y_{T-1} (rows).
  Matrix measurements;
  bool halted = false;
  NpcStatus halt_status = NpcStatus::Optimal;
  std::string halt_reason;

  [[nodiscard]] int d_max() const;
  [[nodiscard]] int plant_steps() const { return static_cast<int>(inputs.rows()); }
};

struct ClosedLoopOptions {
  double c3 = 1.0;
  bool check_lemma1 = true;
};

/**
 * Warm-up with zero input for d_max steps from x0, then solve every d_max
 * steps and apply the first d_max predicted inputs until n_steps plant steps
 * have elapsed (warm-up included). Measurements carry uniform noise on
 * [-w_star, w_star] drawn from `seed`. Halts on an infeasible or failed solve.
 */
ClosedLoopRecord run_closed_loop(const PlantModel& plant, std::shared_ptr<const PredictionData> prediction,
                                 const NpcConfig& config, const Vector& x0, double w_star, Seed seed,
                                 int n_steps, const ClosedLoopOptions& opts = {});

/// Builds the Hankel data from `data` and runs the loop.
ClosedLoopRecord run_closed_loop(const PlantModel& plant, const Dictionary& dict,
                                 const DictionaryConstants& constants, const Trajectory& data,
                                 const NpcConfig& config, const Vector& x0, double w_star, Seed seed,
                                 int n_steps, const ClosedLoopOptions& opts = {});

/// Solution-space feasibility of a returned point: input box and slack bound within `tol`.
bool solution_feasible(const NpcProblem& problem, const NpcSolution& sol, double tol);

/**
 * Simulates u_bar*_{[0,L-1]} open loop from the true state x and compares the
 * outputs with y_bar*, index by index.
 */
std::vector<DeviationCheck> verify_lemma1(const PlantModel& plant, const Vector& x, const NpcSolution& sol,
                                          const DictionaryConstants& constants, double w_star, int L);

/// Same check with ||alpha*||_1 and ||sigma*||_inf supplied (stored solves keep only the norms).
std::vector<DeviationCheck> verify_lemma1(const PlantModel& plant, const Vector& x, const NpcSolution& sol,
                                          double alpha_l1, double sigma_inf,
                                          const DictionaryConstants& constants, double w_star, int L);

/**
 * Variant of the deviation check in lifted coordinates: the reference
 * response starts from the past window the controller saw (noisy outputs,
 * applied inputs) and is propagated with the plant's Phi oracle. Requires
 * plant.has_phi().
 */
std::vector<DeviationCheck> verify_lemma1_window(const PlantModel& plant, const NpcSolution& sol,
                                                 const DictionaryConstants& constants, double w_star, int L);

/// Re-runs both checks for every step of a stored record.
void verify_lemma1(ClosedLoopRecord& record, const PlantModel& plant, const DictionaryConstants& constants);

struct SweepCellResult {
  double eps_star = 0.0;
  double w_star = 0.0;
  std::vector<ClosedLoopRecord> runs;
};

struct CellReport {
  double eps_star = 0.0;
  double w_star = 0.0;
  int runs = 0;
  double feasibility_rate = 0.0;
  double beta_hat = 0.0;
  double rho_hat = 0.0;
  double xi_final_median = 0.0;
  double xi_final_max = 0.0;
  bool flagged = false;
};

struct StabilityReport {
  std::vector<CellReport> cells;
  /// Non-decreasing beta_hat along w* for every fixed eps*, and along eps* for every fixed w*.
  bool monotone_in_w = true;
  bool monotone_in_eps = true;
  std::string lyapunov_weight = "identity";
};

/// Mean V over the last (up to) `window` steps of a run.
double plateau_value(const ClosedLoopRecord& run, int window = 5);

/// Throws ArgumentError if a cell has fewer than `min_runs` runs.
StabilityReport estimate_beta(const std::vector<SweepCellResult>& cells, int min_runs = 5);

nlohmann::json to_json(const StabilityReport& r);

/// Work item of a sweep: one closed-loop run, given its cell and seed.
struct SweepTask {
  std::size_t cell = 0;
  Seed seed = 0;
};

/// Runs fn over all tasks; results land in task order. The OpenMP version schedules dynamically.
std::vector<ClosedLoopRecord> run_tasks_serial(const std::vector<SweepTask>& tasks,
                                               const std::function<ClosedLoopRecord(const SweepTask&)>& fn);
std::vector<ClosedLoopRecord> run_tasks_parallel(const std::vector<SweepTask>& tasks,
                                                 const std::function<ClosedLoopRecord(const SweepTask&)>& fn);

/// Seed of (cell, replicate), decorrelated through splitmix64.
Seed derive_seed(Seed base, std::uint64_t cell, std::uint64_t replicate);

}  // namespace ddnpc
