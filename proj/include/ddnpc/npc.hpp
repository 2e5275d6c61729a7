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
#include "ddnpc/constants.hpp"
#include "ddnpc/dictionary.hpp"
#include "ddnpc/lifting.hpp"
#include "ddnpc/qp.hpp"
#include "ddnpc/trajectory.hpp"

#include <memory>
#include <optional>
#include <string>

namespace ddnpc {

struct NpcConfig {
  int L = 6;
  double lambda_alpha = 1e3;
  double lambda_sigma = 1e3;
  Matrix Q;
  Matrix R;
  Vector u_setpoint;
  Vector y_setpoint;
  Box input_box;
  int sqp_max_iters = 50;
  double sqp_tol = 1e-7;
  double qp_tol = 1e-8;

  /// Q = R = I, zero setpoints and the given input box.
  static NpcConfig defaults(int m, int L, Box input_box);

  /// Throws ContractError on L < d_max, non-positive-definite Q/R, bad weights or setpoints.
  void validate(int m, int d_max) const;
};

/// Ingredients of the program that do not change between time steps.
struct PredictionData {
  Dictionary dict;
  /// H_{L+d_max}(Psi(u^d, Xi~^d)), r(L+d_max) x (N-L-d_max+1).
  Matrix hankel_psi;
  /// H_{L+d_max+1}(Xi~^d), n(L+d_max+1) x (N-L-d_max+1).
  Matrix hankel_xi;
  DictionaryConstants constants;
  double w_star = 0.0;
  std::vector<int> d;
  int L = 0;
  /// PE certificate of the Psi data of order L + d_max + n.
  PeCertificate pe;

  [[nodiscard]] int m() const { return static_cast<int>(d.size()); }
  [[nodiscard]] int n() const;
  [[nodiscard]] int d_max() const;

  /// Builds the Hankel pair from (noisy) data. Throws PreconditionError if the PE order is not met.
  static std::shared_ptr<const PredictionData> from_data(const Trajectory& data, const Dictionary& dict,
                                                         const DictionaryConstants& constants,
                                                         double w_star, int L);
};

/// u_{[t-d_max, t-1]} and y~_{[t-d_max, t-1]}: one row per sample, oldest first.
struct PastWindow {
  Matrix u;
  Matrix y;
};

struct NpcProblemData {
  std::shared_ptr<const PredictionData> prediction;
  PastWindow past;
};

/// Offsets of the decision variables (u_bar, free y_bar, alpha, sigma).
struct VariableLayout {
  int L = 0;
  int m = 0;
  int n = 0;
  int r = 0;
  int d_max = 0;
  int n_alpha = 0;
  int n_sigma_psi = 0;
  int n_sigma_xi = 0;
  int n_aux = 0;

  [[nodiscard]] int u(int k, int j) const { return k * m + j; }
  [[nodiscard]] int y(int i, int k) const { return L * m + k * m + i; }
  [[nodiscard]] int alpha(int j) const { return 2 * L * m + j; }
  [[nodiscard]] int sigma(int j) const { return 2 * L * m + n_alpha + j; }
  [[nodiscard]] int n_sigma() const { return n_sigma_psi + n_sigma_xi; }
  [[nodiscard]] int total() const { return 2 * L * m + n_alpha + n_sigma() + n_aux; }
};

/**
 * Value of one predicted sample: either a decision variable or a constant
 * (past window, terminal zero).
 */
struct Slot {
  int var = -1;
  double value = 0.0;
  [[nodiscard]] bool fixed() const { return var < 0; }
};

class NpcProblem {
 public:
  NpcProblem(NpcProblemData data, NpcConfig config);

  [[nodiscard]] const VariableLayout& layout() const { return layout_; }
  [[nodiscard]] const NpcConfig& config() const { return config_; }
  [[nodiscard]] const PredictionData& prediction() const { return *data_.prediction; }
  [[nodiscard]] const PastWindow& past() const { return data_.past; }

  /// u_bar_{k,j} for k in [-d_max, L-1].
  [[nodiscard]] Slot input_slot(int k, int j) const;
  /// y_bar_{i,k} for k in [-d_max, L+d_i-1].
  [[nodiscard]] Slot output_slot(int i, int k) const;

  /// Right-hand side of the slack bound is c0 + c1 (1 + ||alpha||_1).
  [[nodiscard]] double slack_c0() const { return c0_; }
  [[nodiscard]] double slack_c1() const { return c1_; }
  /// True when c0 = c1 = 0, i.e. the slack is pinned to zero.
  [[nodiscard]] bool slack_pinned() const { return c0_ == 0.0 && c1_ == 0.0; }
  /// lambda_alpha * max(eps*, w*).
  [[nodiscard]] double alpha_weight() const { return alpha_weight_; }

  /// Cost of a full decision vector (layout().total() entries).
  [[nodiscard]] double cost(const Vector& x) const;
  /// Quadratic cost 1/2 x'Hx + g'x + c of the full decision vector.
  [[nodiscard]] const Matrix& cost_hessian() const { return cost_hessian_; }
  [[nodiscard]] const Vector& cost_gradient() const { return cost_gradient_; }
  [[nodiscard]] double cost_constant() const { return cost_constant_; }

  /// Stacked [Psi(u_bar, Xi_bar); Xi_bar] over the window for a full decision vector.
  [[nodiscard]] Vector predicted_stack(const Vector& x) const;
  /// Residual [Psi; Xi_bar] + sigma - H alpha of the Hankel constraint.
  [[nodiscard]] Vector hankel_residual(const Vector& x) const;

  /// Set when the data alone make the program infeasible (past inputs outside the box).
  [[nodiscard]] const std::optional<std::string>& assembly_infeasibility() const { return infeasible_; }

 private:
  NpcProblemData data_;
  NpcConfig config_;
  VariableLayout layout_;
  double c0_ = 0.0;
  double c1_ = 0.0;
  double alpha_weight_ = 0.0;
  Matrix cost_hessian_;
  Vector cost_gradient_;
  double cost_constant_ = 0.0;
  std::optional<std::string> infeasible_;
};

/// Validates the data and config and lays out the program for one time step.
NpcProblem assemble(const NpcProblemData& data, const NpcConfig& config);

enum class NpcStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(NpcStatus s);

struct NpcSolution {
  /// Rows k = -d_max..L-1.
  Matrix u_bar;
  /// Channel i holds k = -d_max..L+d_i-1.
  std::vector<Vector> y_bar;
  Vector alpha;
  Vector sigma_psi;
  Vector sigma_xi;
  double cost = 0.0;
  NpcStatus status = NpcStatus::NumericalFailure;
  double kkt_residual = 0.0;
  int sqp_iters = 0;
  int d_max = 0;
  /// Merit value before and after each accepted SQP step.
  std::vector<std::pair<double, double>> merit_steps;
  std::string certificate;
  /// Full decision vector of the returned point.
  Vector x;

  [[nodiscard]] double alpha_l1() const { return alpha.lpNorm<1>(); }
  [[nodiscard]] double alpha_l2() const { return alpha.norm(); }
  [[nodiscard]] double sigma_inf() const;
  /// u_bar_k for k >= -d_max.
  [[nodiscard]] Vector input(int k) const { return u_bar.row(k + d_max).transpose(); }
  /// y_bar_{i,k} for k >= -d_max.
  [[nodiscard]] double output(int i, int k) const { return y_bar[i](k + d_max); }
  /// Per-time sigma block infinity norms, k = -d_max..L (Psi part ends at L-1).
  [[nodiscard]] Vector sigma_block_norms(int r, int n) const;
};

/// || u - u^s ||_R^2 + || y - y^s ||_Q^2.
double stage_cost(const NpcConfig& config, const Vector& u, const Vector& y);

/// K_Psi w* + (eps* + K_w w*) ||G^dagger||_inf (1 + ||alpha||_1).
double slack_bound_rhs(const DictionaryConstants& constants, double w_star, double alpha_l1);

/**
 * SQP: linearizes Psi around the iterate (forward differences, step 1e-6),
 * linearizes ||alpha||_1 through its sign pattern, solves the convex QP with
 * sigma eliminated, and line-searches an l1 merit function. `init` is a
 * shifted previous solution; without it the start is u = u^s, y = y^s and the
 * least-squares alpha.
 */
NpcSolution solve(const NpcProblem& problem, const NpcSolution* init = nullptr);

/// Warm start for time t + d_max: drops the first d_max samples and pads with setpoints.
NpcSolution shift_solution(const NpcSolution& previous, const NpcProblem& next);

}  // namespace ddnpc
