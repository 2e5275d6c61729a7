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
// Acceptance suite. One line per criterion; exit status 1 if any fails.

#include "deepc_oracle.hpp"
#include "oracles.hpp"

#include "ddnpc/closedloop.hpp"
#include "ddnpc/config.hpp"
#include "ddnpc/experiment.hpp"
#include "ddnpc/lifting.hpp"
#include "ddnpc/npc.hpp"
#include "ddnpc/plant.hpp"
#include "ddnpc/qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ddnpc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Shared between criteria 4 and 5.
SweepOutput g_noisy_runs;
bool g_noisy_ready = false;

Outcome nominal_representation() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.plant = "P1";
  const PlantModel& p = cfg.plant_model();
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(-0.3, 0.3), uu(-0.3, 0.3);
  Vector x0(2);
  x0 << ux(rng), ux(rng);
  Matrix u(cfg.L, 1);
  for (int k = 0; k < cfg.L; ++k) u(k, 0) = uu(rng);
  const Trajectory window = p.simulate(x0, u);
  const RepresentationResidual res = nominal_representation_residual(b.clean, dict, window, cfg.L);
  const double secs = seconds_since(t0);
  return {res.residual <= 1e-8 && secs < 1.0,
          "residual " + fmt("%.3e", res.residual) + " (<= 1e-08), " + fmt("%.3f", secs) + " s (< 1 s)"};
}

Outcome deepc_reduction() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.plant = "LTI";
  cfg.x0 = {0.0, 0.0};
  cfg.excitation.amplitude = 1.0;
  const PlantModel& p = cfg.plant_model();
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const int d = p.d()[0];

  DictionaryConstants c;
  c.eps_star = 0.1;
  c.k_psi = 1.0;
  c.k_xi = 1.0;
  c.k_w = 0.0;
  c.g_matrix = Matrix::Ones(1, 1);
  c.g_dagger_inf_norm = 1.0;
  c.omega_box = Box::symmetric(1 + d, 5.0);
  const auto pred = PredictionData::from_data(b.data, dict, c, 0.0, cfg.L);
  const NpcConfig ncfg = cfg.npc_config();

  oracle::DeepcInstance inst;
  inst.d = d;
  inst.L = cfg.L;
  for (int k = 0; k < b.data.length(); ++k) inst.u_data.push_back(b.data.u(k, 0));
  for (int k = 0; k < b.data.y[0].size(); ++k) inst.y_data.push_back(b.data.y[0](k));
  inst.q = 1.0;
  inst.r = 1.0;
  inst.w_alpha = ncfg.lambda_alpha * c.eps_star;
  inst.lambda_sigma = ncfg.lambda_sigma;

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  double worst_cost = 0.0, worst_input = 0.0;
  int inactive_violations = 0;
  bool all_solved = true;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(2);
    x << ux(rng), ux(rng);
    Matrix u_past(d, 1);
    for (int k = 0; k < d; ++k) u_past(k, 0) = ux(rng);
    const Trajectory past = p.simulate(x, u_past);
    PastWindow w{u_past, Matrix(d, 1)};
    for (int k = 0; k < d; ++k) w.y(k, 0) = past.y[0](k);

    const NpcProblem prob = assemble({pred, w}, ncfg);
    const NpcSolution sol = solve(prob);
    all_solved = all_solved && sol.status == NpcStatus::Optimal;

    inst.u_past.assign(u_past.data(), u_past.data() + d);
    inst.y_past.assign(w.y.data(), w.y.data() + d);
    const oracle::DeepcSolution ref = oracle::solve_deepc(inst);

    worst_cost = std::max(worst_cost, std::abs(sol.cost - ref.cost));
    for (int k = 0; k < d; ++k) worst_input = std::max(worst_input, std::abs(sol.input(k)(0) - ref.u(k)));
    // The oracle ignores the slack bound and the input box; both must be slack here.
    const double bound = c.eps_star * (1.0 + ref.alpha.lpNorm<1>());
    if (ref.sigma.lpNorm<Eigen::Infinity>() >= bound || ref.u.lpNorm<Eigen::Infinity>() >= 5.0)
      ++inactive_violations;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max |cost diff| " << fmt("%.3e", worst_cost) << " (<= 1e-06), max |u0 diff| " << fmt("%.3e", worst_input)
     << " (<= 1e-05), active-set violations " << inactive_violations << ", " << fmt("%.2f", secs) << " s (< 10 s)";
  if (!all_solved) os << ", non-optimal SQP status";
  return {all_solved && worst_cost <= 1e-6 && worst_input <= 1e-5 && inactive_violations == 0 && secs < 10.0,
          os.str()};
}

Outcome nominal_stability() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.plant = "P1";
  cfg.L = 6;
  cfg.x0 = {0.5, 0.0};
  cfg.n_steps = 40;
  const PlantModel& p = cfg.plant_model();
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const DictionaryConstants c = fit_constants(cfg, dict, b, 0.0, EpsSetting{});
  const ClosedLoopRecord rec = run_experiment(cfg, dict, c, b.data, 0.0, 0);

  int converged_at = -1;
  for (int t = 0; t < rec.states.rows() && t <= 40; ++t) {
    const Vector xi = p.lifted_state(rec.states.row(t).transpose());
    if (xi.norm() <= 1e-6) {
      converged_at = t;
      break;
    }
  }
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < rec.steps.size(); ++s) {
    if (rec.steps[s].xi_clean.norm() < 1e-6) break;
    worst_increase = std::max(worst_increase, rec.steps[s + 1].V - rec.steps[s].V);
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "eps* " << fmt("%.2e", c.eps_star) << ", ||Xi|| <= 1e-06 at plant step " << converged_at
     << " (<= 40), max V increase " << fmt("%.3e", worst_increase) << " (<= 1e-09), " << fmt("%.2f", secs)
     << " s (< 30 s)";
  if (rec.halted) os << ", halted: " << rec.halt_reason;
  return {!rec.halted && converged_at >= 0 && worst_increase <= 1e-9 && c.eps_star == 0.0 && secs < 30.0, os.str()};
}

Outcome recursive_feasibility() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.plant = "P1";
  cfg.w_star_grid = {1e-3};
  cfg.eps_star_grid = {EpsSetting{}};
  cfg.seeds = 20;
  cfg.n_steps = 2 + 50 * 2;  // warm-up plus 50 solves of d_max = 2 steps
  g_noisy_runs = run_sweep(cfg, true);
  g_noisy_ready = true;
  long solves = 0, feasible = 0;
  int short_runs = 0;
  for (const auto& run : g_noisy_runs.cells.at(0).runs) {
    if (run.steps.size() < 50) ++short_runs;
    for (const auto& s : run.steps) {
      ++solves;
      if (s.feasible) ++feasible;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << feasible << "/" << solves << " feasible solves over " << g_noisy_runs.cells[0].runs.size()
     << " runs (100% required), truncated runs " << short_runs << ", " << fmt("%.1f", secs) << " s (< 300 s)";
  return {solves == 20 * 50 && feasible == solves && short_runs == 0 && secs < 300.0, os.str()};
}

Outcome lemma1_bound_holds() {
  if (!g_noisy_ready) return {false, "criterion 4 runs unavailable"};
  long checks = 0, violations = 0, window_checks = 0, window_violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  double worst_window = std::numeric_limits<double>::infinity();
  for (const auto& run : g_noisy_runs.cells.at(0).runs)
    for (const auto& s : run.steps) {
      for (const auto& chk : s.lemma1) {
        ++checks;
        worst = std::min(worst, chk.margin());
        if (chk.margin() < 0.0) ++violations;
      }
      for (const auto& chk : s.lemma1_window) {
        ++window_checks;
        worst_window = std::min(worst_window, chk.margin());
        if (chk.margin() < 0.0) ++window_violations;
      }
    }
  std::ostringstream os;
  os << violations << "/" << checks << " negative margins from the true state (0 required), min margin "
     << fmt("%.3e", worst) << "; measured-window reference: " << window_violations << "/" << window_checks
     << " negative, min margin " << fmt("%.3e", worst_window);
  return {checks > 0 && violations == 0, os.str()};
}

Outcome beta_monotone() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.plant = "P1";
  cfg.w_star_grid = {0.0, 1e-3, 1e-2};
  cfg.eps_star_grid = {EpsSetting{0.0}};
  cfg.seeds = 20;
  cfg.n_steps = 60;
  const SweepOutput out = run_sweep(cfg, true);
  const auto& cells = out.report.cells;
  bool nondecreasing = true;
  std::ostringstream os;
  os << "beta_hat";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    os << " w=" << cells[i].w_star << ":" << fmt("%.3e", cells[i].beta_hat);
    if (i > 0 && cells[i].beta_hat < cells[i - 1].beta_hat) nondecreasing = false;
  }
  bool flagged = false;
  for (const auto& c : cells) flagged = flagged || c.flagged;
  const double secs = seconds_since(t0);
  const double b00 = cells.at(0).beta_hat;
  os << "; non-decreasing " << (nondecreasing ? "yes" : "no") << ", beta_hat(0,0) <= 1e-09 "
     << (b00 <= 1e-9 ? "yes" : "no") << (flagged ? ", a cell is flagged" : "") << ", " << fmt("%.1f", secs)
     << " s (< 900 s)";
  return {cells.size() == 3 && nondecreasing && b00 <= 1e-9 && !flagged && out.report.monotone_in_w && secs < 900.0,
          os.str()};
}

Outcome pe_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  int agree = 0;
  const int total = 1000;
  for (int trial = 0; trial < total; ++trial) {
    const int eta = std::uniform_int_distribution<int>(1, 2)(rng);
    const int N = std::uniform_int_distribution<int>(1, 12)(rng);
    const int L = std::uniform_int_distribution<int>(1, std::min(4, N))(rng);
    // Small alphabets make rank-deficient sequences common.
    const int span = std::uniform_int_distribution<int>(1, 3)(rng);
    std::uniform_int_distribution<int> val(-span, span);
    std::vector<std::vector<std::int64_t>> seq(eta, std::vector<std::int64_t>(N));
    Matrix s(eta, N);
    for (int e = 0; e < eta; ++e)
      for (int k = 0; k < N; ++k) {
        seq[e][k] = val(rng);
        s(e, k) = static_cast<double>(seq[e][k]);
      }
    const bool exact = oracle::exact_rank(oracle::int_hankel(seq, L)) == eta * L;
    if (is_persistently_exciting(s, L).satisfied == exact) ++agree;
  }
  const double secs = seconds_since(t0);
  return {agree == total && secs < 10.0,
          std::to_string(agree) + "/" + std::to_string(total) + " verdicts agree (100% required), " +
              fmt("%.2f", secs) + " s (< 10 s)"};
}

Outcome qp_correctness() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  auto randn = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  double worst_kkt = 0.0, worst_obj = 0.0;
  int non_optimal = 0, compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    const int p = std::uniform_int_distribution<int>(0, n / 2)(rng);
    const bool equality_only = trial % 4 == 0;
    const int mi = equality_only ? 0 : std::uniform_int_distribution<int>(0, 2 * n)(rng);
    QpProblem qp;
    const Matrix M = randn(n, n);
    qp.P = M * M.transpose() + 1e-2 * Matrix::Identity(n, n);
    qp.q = randn(n, 1);
    const Vector x_feas = randn(n, 1);
    qp.A = randn(p, n);
    qp.b = qp.A * x_feas;
    qp.G = randn(mi, n);
    qp.h = qp.G * x_feas;
    for (int i = 0; i < mi; ++i) qp.h(i) += std::abs(g(rng));
    const QpSolution sol = solve_qp(qp);
    if (sol.status != QpStatus::Optimal) ++non_optimal;

    // KKT residuals recomputed here, absolute.
    Vector stat = qp.P * sol.x + qp.q;
    if (p) stat += qp.A.transpose() * sol.y;
    if (mi) stat += qp.G.transpose() * sol.z;
    double kkt = stat.lpNorm<Eigen::Infinity>();
    if (p) kkt = std::max(kkt, (qp.A * sol.x - qp.b).lpNorm<Eigen::Infinity>());
    for (int i = 0; i < mi; ++i) {
      const double slack = qp.h(i) - qp.G.row(i).dot(sol.x);
      kkt = std::max({kkt, -slack, -sol.z(i), std::abs(sol.z(i) * slack)});
    }
    worst_kkt = std::max(worst_kkt, kkt);

    if (equality_only) {
      const oracle::EqQpResult ref = oracle::equality_qp(qp.P, qp.q, qp.A, qp.b);
      worst_obj = std::max(worst_obj, std::abs(sol.objective - ref.objective));
      ++compared;
    }
  }
  std::ostringstream os;
  os << "max KKT residual " << fmt("%.3e", worst_kkt) << " (<= 1e-08), max |objective diff| "
     << fmt("%.3e", worst_obj) << " over " << compared << " equality-constrained QPs (<= 1e-08), non-optimal "
     << non_optimal << "/200";
  return {non_optimal == 0 && worst_kkt <= 1e-8 && worst_obj <= 1e-8, os.str()};
}

Outcome constants_chain() {
  ExperimentConfig cfg;
  cfg.plant = "P2";
  // The sine term leaves P2 with a narrow basin; wider excitation escapes it.
  cfg.excitation.amplitude = 0.05;
  const PlantModel& p = cfg.plant_model();
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const DictionaryConstants c = fit_constants(cfg, dict, b, 0.0, EpsSetting{});
  const Matrix G = c.g_matrix;
  const Matrix g_pinv = oracle::pinv(G);
  const double pinv_norm = g_pinv.cwiseAbs().rowwise().sum().maxCoeff();
  const double rhs = pinv_norm * c.eps_star;
  const Trajectory& v = b.validation;
  double worst = 0.0;
  long violations = 0;
  const int m = p.m();
  for (int k = 0; k < v.length(); ++k) {
    Vector xi(v.n());
    int row = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p.d()[i]; ++j) xi(row++) = v.y[i](k + j);
    const Vector u = v.u.row(k).transpose();
    Vector err(m);
    for (int i = 0; i < m; ++i) err(i) = v.y[i](k + p.d()[i]);
    err -= G * dict.evaluate(u, xi);
    const double lhs = (g_pinv * err).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, lhs / rhs);
    if (lhs > rhs) ++violations;
  }
  std::ostringstream os;
  os << violations << "/" << v.length() << " validation samples above ||G+||_inf eps* (0 required), eps* "
     << fmt("%.3e", c.eps_star) << ", max ratio " << fmt("%.3f", worst) << ", ||G+||_inf " << fmt("%.4f", pinv_norm)
     << " (library " << fmt("%.4f", c.g_dagger_inf_norm) << ")";
  return {c.eps_star > 0.0 && violations == 0 && std::abs(pinv_norm - c.g_dagger_inf_norm) <= 1e-9 * pinv_norm,
          os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "nominal representation residual (P1)", nominal_representation},
      {2, "linear reduction matches one-shot QP (LTI)", deepc_reduction},
      {3, "nominal convergence and Lyapunov decrease (P1)", nominal_stability},
      {4, "recursive feasibility under noise (P1, w*=1e-3)", recursive_feasibility},
      {5, "open-loop deviation bound on the noisy runs", lemma1_bound_holds},
      {6, "plateau monotone in w*, zero at the origin", beta_monotone},
      {7, "PE verdict equals exact rank", pe_oracle},
      {8, "QP solver KKT and objective", qp_correctness},
      {9, "constants chain on P2 validation data", constants_chain},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
