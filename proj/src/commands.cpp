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
#include "ddnpc/commands.hpp"

#include "ddnpc/experiment.hpp"
#include "ddnpc/io.hpp"

#include <ostream>
#include <cmath>
#include <limits>
#include <sstream>

namespace ddnpc {

namespace fs = std::filesystem;

namespace {

fs::path out_dir(const ExperimentConfig& cfg) { return fs::path(cfg.output_dir); }

int halt_code(const ClosedLoopRecord& rec) {
  if (!rec.halted) return kExitOk;
  return rec.halt_status == NpcStatus::Infeasible ? kExitInfeasible : kExitNumerical;
}

nlohmann::json run_summary(const ClosedLoopRecord& rec) {
  nlohmann::json j;
  j["steps"] = rec.steps.size();
  j["plant_steps"] = rec.plant_steps();
  j["halted"] = rec.halted;
  j["halt_status"] = rec.halted ? to_string(rec.halt_status) : "none";
  j["halt_reason"] = rec.halt_reason;
  j["w_star"] = rec.w_star;
  j["eps_star"] = rec.eps_star;
  j["lyapunov_weight"] = "identity";
  j["c3"] = rec.c3;
  if (!rec.steps.empty()) {
    const auto& last = rec.steps.back();
    j["final_xi_norm"] = last.xi_clean.norm();
    j["final_V"] = last.V;
    double worst = std::numeric_limits<double>::infinity();
    double worst_window = std::numeric_limits<double>::infinity();
    for (const auto& s : rec.steps) {
      if (!s.lemma1.empty()) worst = std::min(worst, s.lemma1_min_margin());
      if (!s.lemma1_window.empty()) worst_window = std::min(worst_window, s.lemma1_window_min_margin());
    }
    if (std::isfinite(worst)) j["lemma1_min_margin"] = worst;
    if (std::isfinite(worst_window)) j["lemma1_window_min_margin"] = worst_window;
  }
  return j;
}

}  // namespace

int cmd_collect(const ExperimentConfig& cfg, std::ostream& log) {
  const PlantModel& p = cfg.plant_model();
  const int order = cfg.L + p.d_max() + p.n();
  if (cfg.N < cfg.L + p.d_max())
    throw ArgumentError("collect: N = " + std::to_string(cfg.N) + " is shorter than L + d_max");
  const DataBundle b = collect_data(cfg, cfg.w_star, run_seeds(cfg.seed, 0, 0).data_noise);
  const Dictionary dict = cfg.make_dictionary();
  const PeCertificate cert = data_certificate(cfg, dict, b.data);
  const fs::path dir = out_dir(cfg);
  write_trajectory(dir / files::kData, b.data);
  write_trajectory(dir / files::kDataClean, b.clean);
  write_trajectory(dir / files::kValidation, b.validation);
  write_json(dir / files::kCertificate, to_json(cert, order));
  write_json(dir / files::kConfig, to_json(cfg));
  log << "collect: N=" << cfg.N << " w*=" << cfg.w_star << " excitation order " << order << " rank " << cert.rank
      << "/" << cert.rows << (cert.satisfied ? " (satisfied)" : " (NOT satisfied)") << '\n';
  return kExitOk;
}

int cmd_fit(const ExperimentConfig& cfg, std::ostream& log) {
  const PlantModel& p = cfg.plant_model();
  const fs::path dir = out_dir(cfg);
  DataBundle b;
  b.data = read_trajectory(dir / files::kData, p.d());
  b.clean = read_trajectory(dir / files::kDataClean, p.d());
  b.validation = read_trajectory(dir / files::kValidation, p.d());
  b.data.noisy = cfg.w_star > 0.0;
  b.data.w_star_used = cfg.w_star;
  const DictionaryConstants c = fit_constants(cfg, cfg.make_dictionary(), b, cfg.w_star, cfg.eps_star);
  write_json(dir / files::kConstants, to_json(c));
  log << "fit: eps*=" << c.eps_star << " K_psi=" << c.k_psi << " K_xi=" << c.k_xi << " K_w=" << c.k_w
      << " |G+|=" << c.g_dagger_inf_norm << " c_pe=" << c.c_pe << '\n';
  for (const auto& note : c.notes) log << "fit: note: " << note << '\n';
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  const PlantModel& p = cfg.plant_model();
  const fs::path dir = out_dir(cfg);
  Trajectory data = read_trajectory(dir / files::kData, p.d());
  const DictionaryConstants c = constants_from_json(read_json(dir / files::kConstants));
  const ClosedLoopRecord rec =
      run_experiment(cfg, cfg.make_dictionary(), c, data, cfg.w_star, run_seeds(cfg.seed, 0, 0).loop);
  write_record(dir / files::kRecord, rec);
  write_solve_states(dir / files::kStates, rec);
  write_solution_dump(dir / files::kSolutions, rec);
  write_json(dir / files::kSummary, run_summary(rec));
  log << "run: " << rec.steps.size() << " solves, " << rec.plant_steps() << " plant steps";
  if (rec.halted) log << ", halted (" << to_string(rec.halt_status) << "): " << rec.halt_reason;
  log << '\n';
  return halt_code(rec);
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const SweepOutput out = run_sweep(cfg, true);
  const fs::path dir = out_dir(cfg);
  for (std::size_t c = 0; c < out.cells.size(); ++c)
    for (std::size_t r = 0; r < out.cells[c].runs.size(); ++r) {
      std::ostringstream name;
      name << "cell_" << c << "_seed_" << r << ".csv";
      write_record(dir / name.str(), out.cells[c].runs[r]);
    }
  write_json(dir / files::kReport, to_json(out.report));
  for (const auto& c : out.report.cells)
    log << "sweep: eps*=" << c.eps_star << " w*=" << c.w_star << " beta=" << c.beta_hat << " rho=" << c.rho_hat
        << " feasible=" << c.feasibility_rate << (c.flagged ? " [flagged]" : "") << '\n';
  log << "sweep: monotone in w*: " << (out.report.monotone_in_w ? "yes" : "no")
      << ", monotone in eps*: " << (out.report.monotone_in_eps ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_verify_bound(const ExperimentConfig& cfg, std::ostream& log) {
  const PlantModel& p = cfg.plant_model();
  const fs::path dir = out_dir(cfg);
  const DictionaryConstants c = constants_from_json(read_json(dir / files::kConstants));
  const auto solves = read_stored_solves(dir / files::kSolutions, dir / files::kStates, p.d());
  std::ostringstream csv;
  csv << "t,channel,k,measured,bound,margin\n";
  long checks = 0;
  long violations = 0;
  for (const auto& s : solves) {
    const auto res = verify_lemma1(p, s.x, s.solution, s.alpha_l1, s.sigma_inf, c, cfg.w_star, cfg.L);
    for (const auto& d : res) {
      ++checks;
      if (d.margin() < 0.0) ++violations;
      csv << s.t << ',' << d.channel + 1 << ',' << d.k << ',' << format_double(d.measured) << ','
          << format_double(d.bound) << ',' << format_double(d.margin()) << '\n';
    }
  }
  write_text_atomic(dir / files::kLemma, csv.str());
  log << "verify-bound: " << checks << " checks, " << violations << " negative margins\n";
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  return kExitFailure;
}

}  // namespace ddnpc
