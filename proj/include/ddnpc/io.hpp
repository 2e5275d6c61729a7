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

// CSV and JSON files of the experiment driver. Every writer goes through a
// temporary file and a rename so readers never see partial output.

#include "ddnpc/closedloop.hpp"
#include "ddnpc/common.hpp"
#include "ddnpc/trajectory.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ddnpc {

void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// `k,u_1..u_m,y_1..y_m`; the trailing output-only rows leave the input cells empty.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
/// The relative degrees are not stored in the file and must be supplied.
Trajectory read_trajectory(const std::filesystem::path& path, const std::vector<int>& d);

/// `t,xi_norm,J,V,alpha_l1,sigma_inf,feasible,lemma1_min_margin,solve_ms`.
std::string record_csv(const ClosedLoopRecord& rec);
void write_record(const std::filesystem::path& path, const ClosedLoopRecord& rec);

/// `t,x_1..x_n`, one row per solve: the true state the solve started from.
void write_solve_states(const std::filesystem::path& path, const ClosedLoopRecord& rec);

/**
 * Solution dump: per solve a `# t=<t>` line, a block with columns
 * `k,u_bar_1..u_bar_m,y_bar_1..y_bar_m,sigma_inf_norm` and the footer
 * `J,alpha_l1,alpha_l2,kkt,iters,status`.
 */
std::string solution_dump(const ClosedLoopRecord& rec);
void write_solution_dump(const std::filesystem::path& path, const ClosedLoopRecord& rec);

/// One solve read back from a dump: enough to re-evaluate the deviation bound.
struct StoredSolve {
  int t = 0;
  Vector x;
  NpcSolution solution;
  double alpha_l1 = 0.0;
  double sigma_inf = 0.0;
};

/// Reads a dump plus the matching states file. Norms are kept as stored.
std::vector<StoredSolve> read_stored_solves(const std::filesystem::path& dump,
                                            const std::filesystem::path& states, const std::vector<int>& d);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace ddnpc
