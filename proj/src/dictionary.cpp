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
#include "ddnpc/dictionary.hpp"

#include "ddnpc/lifting.hpp"
#include "ddnpc/parallel.hpp"
#include "ddnpc/plant.hpp"

#include <cmath>

namespace ddnpc {

Dictionary::Dictionary(int m, int n, int r, std::variant<MonomialBasis, RadialBasis> basis)
    : m_(m), n_(n), r_(r), basis_(std::move(basis)) {}

Dictionary Dictionary::monomial(int m, int n, std::vector<std::vector<int>> exponents) {
  require(m >= 1 && n >= 1, "dictionary: dimensions must be positive");
  require(!exponents.empty(), "dictionary: need at least one basis function");
  for (const auto& row : exponents) {
    require(static_cast<int>(row.size()) == m + n, "dictionary: exponent row must have m + n entries");
    for (int e : row) require(e >= 0, "dictionary: exponents must be non-negative");
  }
  const int r = static_cast<int>(exponents.size());
  return Dictionary(m, n, r, MonomialBasis{std::move(exponents)});
}

Dictionary Dictionary::radial(int m, int n, std::vector<Vector> centers, std::vector<double> widths) {
  require(!centers.empty() && centers.size() == widths.size(),
          "dictionary: need matching non-empty centers and widths");
  for (std::size_t j = 0; j < centers.size(); ++j) {
    require(centers[j].size() == m + n, "dictionary: RBF center must have m + n entries");
    require(widths[j] > 0.0, "dictionary: RBF widths must be positive");
  }
  const int r = static_cast<int>(centers.size());
  return Dictionary(m, n, r, RadialBasis{std::move(centers), std::move(widths)});
}

Dictionary Dictionary::all_monomials(int m, int n, int max_degree) {
  require(max_degree >= 1, "dictionary: max_degree must be >= 1");
  const int vars = m + n;
  std::vector<std::vector<int>> rows;
  // Enumerate non-decreasing index tuples per degree; each tuple is one monomial.
  for (int deg = 1; deg <= max_degree; ++deg) {
    std::vector<int> idx(deg, 0);
    while (true) {
      std::vector<int> e(vars, 0);
      for (int v : idx) ++e[v];
      rows.push_back(std::move(e));
      int p = deg - 1;
      while (p >= 0 && idx[p] == vars - 1) --p;
      if (p < 0) break;
      ++idx[p];
      for (int q = p + 1; q < deg; ++q) idx[q] = idx[p];
    }
  }
  return monomial(m, n, std::move(rows));
}

Vector Dictionary::evaluate(const Vector& u, const Vector& xi) const {
  require(u.size() == m_ && xi.size() == n_,
          "dictionary: expected u in R^" + std::to_string(m_) + " and Xi in R^" + std::to_string(n_));
  Vector z(m_ + n_);
  z << u, xi;
  Vector out(r_);
  if (const auto* mono = std::get_if<MonomialBasis>(&basis_)) {
    for (int j = 0; j < r_; ++j) {
      double v = 1.0;
      const auto& e = mono->exponents[j];
      for (int q = 0; q < m_ + n_; ++q)
        for (int p = 0; p < e[q]; ++p) v *= z(q);
      out(j) = v;
    }
  } else {
    const auto& rbf = std::get<RadialBasis>(basis_);
    for (int j = 0; j < r_; ++j) {
      const double w = rbf.widths[j];
      out(j) = std::exp(-(z - rbf.centers[j]).squaredNorm() / (2.0 * w * w));
    }
  }
  return out;
}

Matrix Dictionary::evaluate_columns(const Matrix& u, const Matrix& xi) const {
  require(u.rows() == m_ && xi.rows() == n_ && u.cols() == xi.cols(),
          "dictionary: column inputs have inconsistent shapes");
  return par::map_columns(r_, u.cols(), [&](Eigen::Index c) {
    return evaluate(u.col(c), xi.col(c));
  });
}

Matrix Dictionary::evaluate_sequence(const Trajectory& traj, int k_begin, int k_end) const {
  require(traj.m() == m_ && traj.n() == n_, "dictionary: trajectory dimensions do not match");
  return evaluate_columns(input_sequence(traj, k_begin, k_end), lift_sequence(traj, k_begin, k_end));
}

Matrix Dictionary::jacobian(const Vector& u, const Vector& xi, double step) const {
  const Vector base = evaluate(u, xi);
  Matrix J(r_, m_ + n_);
  for (int q = 0; q < m_; ++q) {
    Vector up = u;
    up(q) += step;
    J.col(q) = (evaluate(up, xi) - base) / step;
  }
  for (int q = 0; q < n_; ++q) {
    Vector xp = xi;
    xp(q) += step;
    J.col(m_ + q) = (evaluate(u, xp) - base) / step;
  }
  return J;
}

nlohmann::json Dictionary::descriptor() const {
  nlohmann::json j;
  j["m"] = m_;
  j["n"] = n_;
  if (const auto* mono = std::get_if<MonomialBasis>(&basis_)) {
    j["kind"] = "monomial";
    j["exponents"] = mono->exponents;
  } else {
    const auto& rbf = std::get<RadialBasis>(basis_);
    j["kind"] = "rbf";
    auto centers = nlohmann::json::array();
    for (const auto& c : rbf.centers) centers.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    j["centers"] = centers;
    j["widths"] = rbf.widths;
  }
  return j;
}

Dictionary Dictionary::from_descriptor(const nlohmann::json& j) {
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "monomial") return monomial(m, n, j.at("exponents").get<std::vector<std::vector<int>>>());
  if (kind == "rbf") {
    std::vector<Vector> centers;
    for (const auto& c : j.at("centers")) {
      const auto v = c.get<std::vector<double>>();
      centers.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return radial(m, n, std::move(centers), j.at("widths").get<std::vector<double>>());
  }
  throw ArgumentError("dictionary: unknown descriptor kind '" + kind + "'");
}

Dictionary default_dictionary(const PlantModel& plant) {
  const std::string& id = plant.name();
  if (id == "P1" || id == "P2") return Dictionary::monomial(1, 2, {{0, 2, 0}, {0, 0, 1}, {1, 0, 0}});
  if (id == "LTI") return Dictionary::monomial(1, 2, {{1, 0, 0}});
  return Dictionary::all_monomials(plant.m(), plant.n(), 2);
}

}  // namespace ddnpc
