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
#include "ddnpc/closedloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <random>

#ifdef DDNPC_HAVE_OPENMP
#include <omp.h>
#endif

namespace ddnpc {

double poly_p(int k, double K) {
  require(k >= 0, "poly_p: k must be >= 0");
  require(K >= 0.0, "poly_p: K must be >= 0");
  if (K == 1.0) return k + 1.0;
  return (std::pow(K, k + 1) - 1.0) / (K - 1.0);
}

double lemma1_bound(int k, int d_i, int d_max, const DictionaryConstants& c, double w_star, double alpha_l1,
                    double sigma_inf, double g_inf_norm) {
  require(k >= 0 && d_i >= 1 && d_i <= d_max, "lemma1_bound: bad index");
  const double bracket = c.eps_star * (1.0 + alpha_l1) + (1.0 + c.k_w) * w_star * alpha_l1 +
                         (1.0 + g_inf_norm) * sigma_inf;
  return poly_p(k + d_max - d_i, c.k_xi) * bracket;
}


namespace {

double min_margin(const std::vector<DeviationCheck>& checks) {
  if (checks.empty()) return std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) best = std::min(best, c.margin());
  return best;
}

}  // namespace

double StepRecord::lemma1_min_margin() const { return min_margin(lemma1); }
double StepRecord::lemma1_window_min_margin() const { return min_margin(lemma1_window); }

int ClosedLoopRecord::d_max() const { return *std::max_element(d.begin(), d.end()); }

bool solution_feasible(const NpcProblem& problem, const NpcSolution& sol, double tol) {
  const auto& lay = problem.layout();
  const Box& box = problem.config().input_box;
  for (int k = 0; k < lay.L; ++k)
    if (!box.contains(sol.input(k), tol)) return false;
  const double s = sol.sigma_inf();
  if (problem.slack_pinned()) return s <= tol;
  const double rhs = problem.slack_c0() + problem.slack_c1() * (1.0 + sol.alpha_l1());
  return s <= rhs + tol * (1.0 + rhs);
}

std::vector<DeviationCheck> verify_lemma1(const PlantModel& plant, const Vector& x, const NpcSolution& sol,
                                          const DictionaryConstants& constants, double w_star, int L) {
  return verify_lemma1(plant, x, sol, sol.alpha_l1(), sol.sigma_inf(), constants, w_star, L);
}

std::vector<DeviationCheck> verify_lemma1(const PlantModel& plant, const Vector& x, const NpcSolution& sol,
                                          double alpha_l1, double sigma_inf,
                                          const DictionaryConstants& constants, double w_star, int L) {
  const auto& d = plant.d();
  const int m = plant.m();
  const int dmax = plant.d_max();
  Matrix y(L, m);
  Vector state = x;
  for (int k = 0; k < L; ++k) {
    y.row(k) = plant.output(state).transpose();
    state = plant.step(state, sol.input(k));
  }
  const Vector tail = plant.lifted_state(state);
  const double g_norm = constants.g_inf_norm();
  std::vector<DeviationCheck> out;
  int offset = 0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < L + d[i]; ++k) {
      const double actual = k < L ? y(k, i) : tail(offset + k - L);
      DeviationCheck c;
      c.channel = i;
      c.k = k;
      c.measured = std::abs(actual - sol.output(i, k));
      c.bound = lemma1_bound(k, d[i], dmax, constants, w_star, alpha_l1, sigma_inf, g_norm);
      out.push_back(c);
    }
    offset += d[i];
  }
  return out;
}

std::vector<DeviationCheck> verify_lemma1_window(const PlantModel& plant, const NpcSolution& sol,
                                                 const DictionaryConstants& constants, double w_star, int L) {
  const auto& d = plant.d();
  const int m = plant.m();
  const int dmax = plant.d_max();
  // resp[i](j + dmax) is the reference output of channel i at prediction index j.
  std::vector<Vector> resp(m);
  for (int i = 0; i < m; ++i) {
    resp[i] = Vector::Zero(L + dmax + d[i]);
    for (int j = -dmax; j < 0; ++j) resp[i](j + dmax) = sol.output(i, j);
  }
  Vector xi(plant.n());
  for (int k = -dmax; k < L; ++k) {
    int q = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d[i]; ++j) xi(q++) = resp[i](k + j + dmax);
    const Vector v = plant.true_phi(sol.input(k), xi);
    for (int i = 0; i < m; ++i)
      if (k + d[i] >= 0) resp[i](k + d[i] + dmax) = v(i);
  }
  const double g_norm = constants.g_inf_norm();
  std::vector<DeviationCheck> out;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < L + d[i]; ++k) {
      DeviationCheck c;
      c.channel = i;
      c.k = k;
      c.measured = std::abs(resp[i](k + dmax) - sol.output(i, k));
      c.bound = lemma1_bound(k, d[i], dmax, constants, w_star, sol.alpha_l1(), sol.sigma_inf(), g_norm);
      out.push_back(c);
    }
  }
  return out;
}

void verify_lemma1(ClosedLoopRecord& record, const PlantModel& plant, const DictionaryConstants& constants) {
  for (auto& s : record.steps) {
    if (s.solution.u_bar.size() == 0) continue;
    s.lemma1 = verify_lemma1(plant, s.x, s.solution, constants, record.w_star, record.L);
    if (plant.has_phi()) s.lemma1_window = verify_lemma1_window(plant, s.solution, constants, record.w_star, record.L);
  }
}

ClosedLoopRecord run_closed_loop(const PlantModel& plant, std::shared_ptr<const PredictionData> prediction,
                                 const NpcConfig& config, const Vector& x0, double w_star, Seed seed,
                                 int n_steps, const ClosedLoopOptions& opts) {
  require(prediction != nullptr, "run_closed_loop: missing prediction data");
  require(x0.size() == plant.n(), "run_closed_loop: x0 has the wrong dimension");
  require(w_star >= 0.0, "run_closed_loop: w_star must be >= 0");
  require(prediction->d == plant.d(), "run_closed_loop: data and plant disagree on the relative degrees");
  const int dmax = plant.d_max();
  const int m = plant.m();
  require(n_steps >= 2 * dmax && n_steps % dmax == 0,
          "run_closed_loop: n_steps must be a multiple of d_max covering the warm-up and one solve");

  ClosedLoopRecord rec;
  rec.d = plant.d();
  rec.L = config.L;
  rec.w_star = w_star;
  rec.eps_star = prediction->constants.eps_star;
  rec.c3 = opts.c3;
  rec.seed = seed;
  rec.states = Matrix::Zero(n_steps + 1, plant.n());
  rec.inputs = Matrix::Zero(n_steps, m);
  rec.measurements = Matrix::Zero(n_steps, m);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-w_star, w_star);
  Vector x = x0;
  int time = 0;
  auto advance = [&](const Vector& u) {
    Vector y = plant.output(x);
    if (w_star > 0.0)
      for (int i = 0; i < m; ++i) y(i) += noise(rng);
    rec.states.row(time) = x.transpose();
    rec.measurements.row(time) = y.transpose();
    rec.inputs.row(time) = u.transpose();
    x = plant.step(x, u);
    ++time;
  };
  for (int k = 0; k < dmax; ++k) advance(Vector::Zero(m));

  // Lifted setpoint: every window sits at y^s.
  Vector xi_set(plant.n());
  {
    int q = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < rec.d[i]; ++j) xi_set(q++) = config.y_setpoint(i);
  }

  std::optional<NpcSolution> prev;
  while (time + dmax <= n_steps) {
    NpcProblemData pd{prediction, {rec.inputs.middleRows(time - dmax, dmax), rec.measurements.middleRows(time - dmax, dmax)}};
    const NpcProblem problem = assemble(pd, config);
    std::optional<NpcSolution> init;
    if (prev) init = shift_solution(*prev, problem);
    const auto t0 = std::chrono::steady_clock::now();
    NpcSolution sol = solve(problem, init ? &*init : nullptr);
    const auto t1 = std::chrono::steady_clock::now();

    StepRecord s;
    s.t = time;
    s.x = x;
    s.xi_clean = plant.lifted_state(x);
    s.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    s.status = sol.status;
    s.sqp_iters = sol.sqp_iters;
    s.J = sol.cost;
    s.V = sol.cost + opts.c3 * (s.xi_clean - xi_set).squaredNorm();
    s.alpha_l1 = sol.alpha_l1();
    s.alpha_l2 = sol.alpha_l2();
    s.sigma_inf = sol.sigma_inf();
    const bool converged = sol.status == NpcStatus::Optimal || sol.status == NpcStatus::MaxIterations;
    s.feasible = converged && solution_feasible(problem, sol, 1e-6);
    if (!s.feasible) {
      rec.halted = true;
      rec.halt_status = converged ? NpcStatus::NumericalFailure : sol.status;
      rec.halt_reason = sol.certificate.empty() ? "returned point violates the constraints" : sol.certificate;
      s.solution = std::move(sol);
      rec.steps.push_back(std::move(s));
      break;
    }
    if (opts.check_lemma1) {
      s.lemma1 = verify_lemma1(plant, x, sol, prediction->constants, w_star, config.L);
      if (plant.has_phi())
        s.lemma1_window = verify_lemma1_window(plant, sol, prediction->constants, w_star, config.L);
    }
    s.applied.resize(dmax, m);
    for (int j = 0; j < dmax; ++j) {
      s.applied.row(j) = sol.input(j).transpose();
      advance(sol.input(j));
    }
    // All outputs of Xi_t have been measured by now (d_i <= d_max).
    s.xi_measured.resize(plant.n());
    int q = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < rec.d[i]; ++j) s.xi_measured(q++) = rec.measurements(s.t + j, i);
    s.solution = sol;
    prev = std::move(sol);
    rec.steps.push_back(std::move(s));
  }
  rec.states.conservativeResize(time + 1, Eigen::NoChange);
  rec.states.row(time) = x.transpose();
  rec.inputs.conservativeResize(time, Eigen::NoChange);
  rec.measurements.conservativeResize(time, Eigen::NoChange);
  return rec;
}

ClosedLoopRecord run_closed_loop(const PlantModel& plant, const Dictionary& dict,
                                 const DictionaryConstants& constants, const Trajectory& data,
                                 const NpcConfig& config, const Vector& x0, double w_star, Seed seed,
                                 int n_steps, const ClosedLoopOptions& opts) {
  auto prediction = PredictionData::from_data(data, dict, constants, w_star, config.L);
  return run_closed_loop(plant, prediction, config, x0, w_star, seed, n_steps, opts);
}

double plateau_value(const ClosedLoopRecord& run, int window) {
  require(window >= 1, "plateau_value: window must be >= 1");
  require(!run.steps.empty(), "plateau_value: run has no steps");
  const int count = std::min<int>(window, static_cast<int>(run.steps.size()));
  double sum = 0.0;
  for (int j = static_cast<int>(run.steps.size()) - count; j < static_cast<int>(run.steps.size()); ++j)
    sum += run.steps[j].V;
  return sum / count;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StabilityReport estimate_beta(const std::vector<SweepCellResult>& cells, int min_runs) {
  if (cells.empty()) throw ArgumentError("estimate_beta: empty grid");
  StabilityReport rep;
  for (const auto& cell : cells) {
    if (static_cast<int>(cell.runs.size()) < min_runs)
      throw ArgumentError("estimate_beta: cell has " + std::to_string(cell.runs.size()) + " runs, need " +
                          std::to_string(min_runs));
    CellReport cr;
    cr.eps_star = cell.eps_star;
    cr.w_star = cell.w_star;
    cr.runs = static_cast<int>(cell.runs.size());
    std::vector<double> plateaus;
    std::vector<double> finals;
    int ok = 0;
    for (const auto& run : cell.runs) {
      if (!run.halted) ++ok;
      if (!run.steps.empty()) {
        plateaus.push_back(plateau_value(run));
        finals.push_back(run.steps.back().xi_clean.norm());
      }
    }
    cr.feasibility_rate = static_cast<double>(ok) / cr.runs;
    cr.flagged = ok < cr.runs;
    cr.beta_hat = plateaus.empty() ? 0.0 : std::max(0.0, median(plateaus));
    if (!finals.empty()) {
      cr.xi_final_median = median(finals);
      cr.xi_final_max = *std::max_element(finals.begin(), finals.end());
    }
    const double outside = std::max(10.0 * cr.beta_hat, 1e-10);
    for (const auto& run : cell.runs)
      for (std::size_t j = 0; j + 1 < run.steps.size(); ++j)
        if (run.steps[j].V > outside) cr.rho_hat = std::max(cr.rho_hat, run.steps[j + 1].V / run.steps[j].V);
    rep.cells.push_back(cr);
  }
  // Monotonicity along each grid axis, ignoring flagged cells.
  auto check_axis = [&](bool by_w) {
    std::map<double, std::vector<const CellReport*>> lines;
    for (const auto& c : rep.cells)
      if (!c.flagged) lines[by_w ? c.eps_star : c.w_star].push_back(&c);
    for (auto& [key, line] : lines) {
      std::sort(line.begin(), line.end(), [&](const CellReport* a, const CellReport* b) {
        return by_w ? a->w_star < b->w_star : a->eps_star < b->eps_star;
      });
      for (std::size_t j = 0; j + 1 < line.size(); ++j)
        if (line[j + 1]->beta_hat < line[j]->beta_hat) return false;
    }
    return true;
  };
  rep.monotone_in_w = check_axis(true);
  rep.monotone_in_eps = check_axis(false);
  return rep;
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json j;
  j["lyapunov_weight"] = r.lyapunov_weight;
  j["monotone_in_w_star"] = r.monotone_in_w;
  j["monotone_in_eps_star"] = r.monotone_in_eps;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back({{"eps_star", c.eps_star},
                          {"w_star", c.w_star},
                          {"runs", c.runs},
                          {"feasibility_rate", c.feasibility_rate},
                          {"beta_hat", c.beta_hat},
                          {"rho_hat", c.rho_hat},
                          {"xi_final_median", c.xi_final_median},
                          {"xi_final_max", c.xi_final_max},
                          {"flagged", c.flagged}});
  }
  return j;
}

std::vector<ClosedLoopRecord> run_tasks_serial(const std::vector<SweepTask>& tasks,
                                               const std::function<ClosedLoopRecord(const SweepTask&)>& fn) {
  std::vector<ClosedLoopRecord> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(fn(t));
  return out;
}

std::vector<ClosedLoopRecord> run_tasks_parallel(const std::vector<SweepTask>& tasks,
                                                 const std::function<ClosedLoopRecord(const SweepTask&)>& fn) {
#ifdef DDNPC_HAVE_OPENMP
  std::vector<ClosedLoopRecord> out(tasks.size());
  std::exception_ptr failure;
  const long count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = fn(tasks[i]);
    } catch (...) {
#pragma omp critical(ddnpc_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
#else
  return run_tasks_serial(tasks, fn);
#endif
}

Seed derive_seed(Seed base, std::uint64_t cell, std::uint64_t replicate) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ cell) ^ replicate);
}

}  // namespace ddnpc
