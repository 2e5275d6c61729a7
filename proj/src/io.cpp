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
#include "ddnpc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <limits>
#include <sstream>

namespace ddnpc {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& cell, const std::string& where) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw IoError("cannot parse number '" + cell + "' in " + where);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  traj.validate();
  const int N = traj.length();
  const int m = traj.m();
  std::ostringstream out;
  out << "k";
  for (int j = 0; j < m; ++j) out << ",u_" << j + 1;
  for (int i = 0; i < m; ++i) out << ",y_" << i + 1;
  out << '\n';
  for (int k = 0; k < N + traj.d_max(); ++k) {
    out << k;
    for (int j = 0; j < m; ++j) {
      out << ',';
      if (k < N) out << format_double(traj.u(k, j));
    }
    for (int i = 0; i < m; ++i) {
      out << ',';
      if (k < traj.y[i].size()) out << format_double(traj.y[i](k));
    }
    out << '\n';
  }
  return out.str();
}

void write_trajectory(const fs::path& path, const Trajectory& traj) { write_text_atomic(path, trajectory_csv(traj)); }

Trajectory read_trajectory(const fs::path& path, const std::vector<int>& d) {
  const auto lines = lines_of(read_text(path));
  const int m = static_cast<int>(d.size());
  if (lines.empty()) throw IoError(path.string() + " is empty");
  const auto header = split(lines[0]);
  if (static_cast<int>(header.size()) != 1 + 2 * m || header[0] != "k")
    throw IoError(path.string() + ": header does not match " + std::to_string(m) + " channels");
  std::vector<std::vector<double>> u(m);
  std::vector<std::vector<double>> y(m);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto cells = split(lines[row]);
    const std::string where = path.string() + " line " + std::to_string(row + 1);
    if (static_cast<int>(cells.size()) != 1 + 2 * m) throw IoError(where + ": wrong number of cells");
    for (int j = 0; j < m; ++j)
      if (!cells[1 + j].empty()) {
        if (u[j].size() != row - 1) throw IoError(where + ": input gap");
        u[j].push_back(parse_double(cells[1 + j], where));
      }
    for (int i = 0; i < m; ++i)
      if (!cells[1 + m + i].empty()) {
        if (y[i].size() != row - 1) throw IoError(where + ": output gap");
        y[i].push_back(parse_double(cells[1 + m + i], where));
      }
  }
  Trajectory traj;
  traj.d = d;
  const std::size_t N = u.empty() ? 0 : u[0].size();
  traj.u.resize(static_cast<Eigen::Index>(N), m);
  for (int j = 0; j < m; ++j) {
    if (u[j].size() != N) throw IoError(path.string() + ": input columns have different lengths");
    for (std::size_t k = 0; k < N; ++k) traj.u(static_cast<Eigen::Index>(k), j) = u[j][k];
  }
  traj.y.resize(m);
  for (int i = 0; i < m; ++i) traj.y[i] = Eigen::Map<const Vector>(y[i].data(), static_cast<Eigen::Index>(y[i].size()));
  try {
    traj.validate();
  } catch (const ContractError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return traj;
}

std::string record_csv(const ClosedLoopRecord& rec) {
  std::ostringstream out;
  out << "t,xi_norm,J,V,alpha_l1,sigma_inf,feasible,lemma1_min_margin,solve_ms\n";
  for (const auto& s : rec.steps) {
    out << s.t << ',' << format_double(s.xi_clean.norm()) << ',' << format_double(s.J) << ','
        << format_double(s.V) << ',' << format_double(s.alpha_l1) << ',' << format_double(s.sigma_inf) << ','
        << (s.feasible ? 1 : 0) << ',' << format_double(s.lemma1_min_margin()) << ','
        << format_double(s.solve_ms) << '\n';
  }
  return out.str();
}

void write_record(const fs::path& path, const ClosedLoopRecord& rec) { write_text_atomic(path, record_csv(rec)); }

void write_solve_states(const fs::path& path, const ClosedLoopRecord& rec) {
  std::ostringstream out;
  out << "t";
  const int n = rec.states.cols();
  for (int q = 0; q < n; ++q) out << ",x_" << q + 1;
  out << '\n';
  for (const auto& s : rec.steps) {
    out << s.t;
    for (int q = 0; q < n; ++q) out << ',' << format_double(s.x(q));
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

std::string solution_dump(const ClosedLoopRecord& rec) {
  const int m = static_cast<int>(rec.d.size());
  const int dmax = rec.d_max();
  int n = 0;
  for (int di : rec.d) n += di;
  std::ostringstream out;
  for (const auto& s : rec.steps) {
    const NpcSolution& sol = s.solution;
    if (sol.u_bar.size() == 0) continue;
    out << "# t=" << s.t << '\n';
    out << "k";
    for (int j = 0; j < m; ++j) out << ",u_bar_" << j + 1;
    for (int i = 0; i < m; ++i) out << ",y_bar_" << i + 1;
    out << ",sigma_inf_norm\n";
    const int r = sol.sigma_psi.size() / (rec.L + dmax);
    const Vector blocks = sol.sigma_block_norms(r, n);
    for (int k = -dmax; k < rec.L + dmax; ++k) {
      out << k;
      for (int j = 0; j < m; ++j) {
        out << ',';
        if (k < rec.L) out << format_double(sol.input(k)(j));
      }
      for (int i = 0; i < m; ++i) {
        out << ',';
        if (k < rec.L + rec.d[i]) out << format_double(sol.output(i, k));
      }
      out << ',';
      if (k + dmax < blocks.size()) out << format_double(blocks(k + dmax));
      out << '\n';
    }
    out << "J,alpha_l1,alpha_l2,kkt,iters,status\n";
    out << format_double(sol.cost) << ',' << format_double(sol.alpha_l1()) << ',' << format_double(sol.alpha_l2())
        << ',' << format_double(sol.kkt_residual) << ',' << sol.sqp_iters << ',' << to_string(sol.status) << '\n';
  }
  return out.str();
}

void write_solution_dump(const fs::path& path, const ClosedLoopRecord& rec) {
  write_text_atomic(path, solution_dump(rec));
}

std::vector<StoredSolve> read_stored_solves(const fs::path& dump, const fs::path& states, const std::vector<int>& d) {
  const int m = static_cast<int>(d.size());
  int dmax = 0;
  for (int di : d) dmax = std::max(dmax, di);

  std::map<int, Vector> x_at;
  {
    const auto lines = lines_of(read_text(states));
    for (std::size_t row = 1; row < lines.size(); ++row) {
      if (lines[row].empty()) continue;
      const auto cells = split(lines[row]);
      const std::string where = states.string() + " line " + std::to_string(row + 1);
      Vector x(static_cast<Eigen::Index>(cells.size()) - 1);
      for (std::size_t q = 1; q < cells.size(); ++q) x(q - 1) = parse_double(cells[q], where);
      x_at[static_cast<int>(parse_double(cells[0], where))] = x;
    }
  }

  std::vector<StoredSolve> out;
  const auto lines = lines_of(read_text(dump));
  std::size_t row = 0;
  while (row < lines.size()) {
    if (lines[row].empty()) {
      ++row;
      continue;
    }
    if (lines[row].rfind("# t=", 0) != 0) throw IoError(dump.string() + " line " + std::to_string(row + 1) + ": expected '# t='");
    StoredSolve s;
    s.t = std::stoi(lines[row].substr(4));
    row += 2;  // block header
    std::vector<std::vector<std::string>> block;
    while (row < lines.size() && lines[row].rfind("J,", 0) != 0) block.push_back(split(lines[row++]));
    if (row + 1 >= lines.size()) throw IoError(dump.string() + ": truncated block at t=" + std::to_string(s.t));
    const auto footer = split(lines[row + 1]);
    row += 2;
    const std::string where = dump.string() + " block t=" + std::to_string(s.t);
    if (footer.size() != 6) throw IoError(where + ": malformed footer");
    const int L = static_cast<int>(block.size()) - 2 * dmax;
    if (L < 1) throw IoError(where + ": block too short");
    NpcSolution& sol = s.solution;
    sol.d_max = dmax;
    sol.u_bar.resize(L + dmax, m);
    sol.y_bar.resize(m);
    for (int i = 0; i < m; ++i) sol.y_bar[i].resize(L + dmax + d[i]);
    for (int b = 0; b < static_cast<int>(block.size()); ++b) {
      const auto& cells = block[b];
      if (static_cast<int>(cells.size()) != 2 + 2 * m) throw IoError(where + ": wrong number of cells");
      if (b < L + dmax)
        for (int j = 0; j < m; ++j) sol.u_bar(b, j) = parse_double(cells[1 + j], where);
      for (int i = 0; i < m; ++i)
        if (b < L + dmax + d[i]) sol.y_bar[i](b) = parse_double(cells[1 + m + i], where);
    }
    sol.cost = parse_double(footer[0], where);
    s.alpha_l1 = parse_double(footer[1], where);
    sol.kkt_residual = parse_double(footer[3], where);
    sol.sqp_iters = std::stoi(footer[4]);
    double sig = 0.0;
    for (const auto& cells : block)
      if (!cells.back().empty()) sig = std::max(sig, parse_double(cells.back(), where));
    s.sigma_inf = sig;
    const auto it = x_at.find(s.t);
    if (it == x_at.end()) throw IoError(states.string() + ": no state for t=" + std::to_string(s.t));
    s.x = it->second;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ddnpc
