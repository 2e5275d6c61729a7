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

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace ddnpc {

using TransitionMap = std::function<Vector(const Vector& x, const Vector& u)>;
using OutputMap = std::function<Vector(const Vector& x)>;
/// Synthetic input Phi(u, Xi); the d_i-step-ahead outputs as a function of the lifted state.
using PhiMap = std::function<Vector(const Vector& u, const Vector& xi)>;

/**
 * Discrete-time MIMO plant x+ = f(x, u), y = h(x) with a known relative
 * degree vector d. Immutable after construction.
 */
class PlantModel {
 public:
  PlantModel(std::string name, int n, int m, std::vector<int> d, TransitionMap f, OutputMap h,
             PhiMap phi_true, Box input_box);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] const std::vector<int>& d() const { return d_; }
  [[nodiscard]] int d_max() const;
  [[nodiscard]] const Box& input_box() const { return input_box_; }
  [[nodiscard]] bool has_phi() const { return static_cast<bool>(phi_true_); }

  [[nodiscard]] Vector output(const Vector& x) const;

  /// One transition of the plant.
  [[nodiscard]] Vector step(const Vector& x, const Vector& u) const;

  /**
   * Runs the plant from x0 under u_seq (N x m, one row per sample). Channel i
   * of the result holds N + d_i samples: every output the inputs determine.
   */
  [[nodiscard]] Trajectory simulate(const Vector& x0, const Matrix& u_seq) const;

  /// Test oracle for Phi(u, Xi). Throws UnsupportedError if the plant has none.
  [[nodiscard]] Vector true_phi(const Vector& u, const Vector& xi) const;

  /// Xi_k of the noise-free plant at state x: the next d_i outputs of each channel.
  [[nodiscard]] Vector lifted_state(const Vector& x) const;

 private:
  std::string name_;
  int n_;
  int m_;
  std::vector<int> d_;
  TransitionMap f_;
  OutputMap h_;
  PhiMap phi_true_;
  Box input_box_;
};

/// Named test plants: P1, P2, P3 and LTI.
const std::map<std::string, PlantModel>& builtin_plants();

/// Registry lookup; throws LookupError on an unknown id.
const PlantModel& find_plant(const std::string& name);

struct RelativeDegreeCheck {
  bool passed = true;
  std::string detail;
};

/**
 * Finite-difference relative-degree test at (x, u): perturbing u_k must move
 * y_{i,k+d_i} and no earlier sample of channel i.
 */
RelativeDegreeCheck check_relative_degree(const PlantModel& plant, const Vector& x, const Vector& u,
                                          double step = 1e-4, double tol = 1e-9);

}  // namespace ddnpc
