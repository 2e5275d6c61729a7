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

#include <string>

namespace ddnpc {

/**
 * Convex QP
 *   minimize    1/2 x^T P x + q^T x
 *   subject to  A x = b,  G x <= h
 * with P symmetric positive semidefinite. Empty A or G means no constraints
 * of that kind (they still need n columns, or zero size).
 */
struct QpProblem {
  Matrix P;
  Vector q;
  Matrix A;
  Vector b;
  Matrix G;
  Vector h;

  [[nodiscard]] Eigen::Index num_vars() const { return q.size(); }
  [[nodiscard]] double objective(const Vector& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
};

enum class QpStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

const char* to_string(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;     // ||P x + q + A^T y + G^T z||_inf
  double primal_equality = 0.0;  // ||A x - b||_inf
  double primal_inequality = 0.0;  // max(G x - h, 0)
  double complementarity = 0.0;  // max |z_i (h - G x)_i|
  double dual_sign = 0.0;        // max(-z, 0)

  [[nodiscard]] double max() const;
};

KktResiduals kkt_residuals(const QpProblem& qp, const Vector& x, const Vector& y, const Vector& z);

struct QpSettings {
  double tol = 1e-8;
  int max_iters = 100;
  bool polish = true;
  /// Primal/dual regularization of the Newton system; removed again by iterative refinement.
  double regularization = 1e-10;
};

struct QpSolution {
  QpStatus status = QpStatus::NumericalFailure;
  Vector x;
  Vector y;  // equality multipliers, one per row of A
  Vector z;  // inequality multipliers (>= 0), one per row of G
  double objective = 0.0;
  KktResiduals kkt;
  int iterations = 0;
  bool polished = false;
  /// Human-readable reason for a non-optimal status (e.g. the minimal uniform violation).
  std::string certificate;
};

/// Primal-dual interior point with Mehrotra correction. Deterministic.
QpSolution solve_qp(const QpProblem& qp, const QpSettings& settings = {});

}  // namespace ddnpc
