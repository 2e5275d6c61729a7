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

#include "ddnpc/common.hpp"
#include "ddnpc/trajectory.hpp"

#include "json.hpp"

#include <variant>

namespace ddnpc {

class PlantModel;

/// Monomial basis: one exponent row per basis function over (u_1..u_m, xi_1..xi_n).
struct MonomialBasis {
  std::vector<std::vector<int>> exponents;
};

/// Gaussian radial basis exp(-||(u, xi) - c_j||^2 / (2 w_j^2)).
struct RadialBasis {
  std::vector<Vector> centers;
  std::vector<double> widths;
};

/**
 * Stack Psi(u, Xi) of r basis functions. Value type; cheap to copy and
 * immutable once built. The descriptor is enough to serialize and rebuild it.
 */
class Dictionary {
 public:
  static Dictionary monomial(int m, int n, std::vector<std::vector<int>> exponents);
  static Dictionary radial(int m, int n, std::vector<Vector> centers, std::vector<double> widths);
  /// Every monomial in (u, Xi) of total degree 1..max_degree, graded order.
  static Dictionary all_monomials(int m, int n, int max_degree);

  [[nodiscard]] int r() const { return r_; }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int n() const { return n_; }

  [[nodiscard]] Vector evaluate(const Vector& u, const Vector& xi) const;

  /// Psi(u_k, Xi_k) for k in [k_begin, k_end) of the stored (possibly noisy) data; r x K.
  [[nodiscard]] Matrix evaluate_sequence(const Trajectory& traj, int k_begin, int k_end) const;

  /// Columnwise evaluation on m x K inputs and n x K lifted states.
  [[nodiscard]] Matrix evaluate_columns(const Matrix& u, const Matrix& xi) const;

  /// Forward-difference Jacobian w.r.t. (u, Xi); r x (m + n).
  [[nodiscard]] Matrix jacobian(const Vector& u, const Vector& xi, double step = 1e-6) const;

  [[nodiscard]] nlohmann::json descriptor() const;
  static Dictionary from_descriptor(const nlohmann::json& j);

 private:
  Dictionary(int m, int n, int r, std::variant<MonomialBasis, RadialBasis> basis);

  int m_ = 0;
  int n_ = 0;
  int r_ = 0;
  std::variant<MonomialBasis, RadialBasis> basis_;
};

/**
 * Default basis per builtin plant: {xi_1^2, xi_2, u} for P1/P2, all monomials
 * of degree <= 2 for P3, {u} for LTI.
 */
Dictionary default_dictionary(const PlantModel& plant);

}  // namespace ddnpc
