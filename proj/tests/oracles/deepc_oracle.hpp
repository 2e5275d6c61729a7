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

// One-shot reference for the linear (DeePC) special case: a SISO plant with
// relative degree d, dictionary {u}, zero setpoints. The Hankel matrices and
// the equality-constrained QP are built here from raw samples and solved
// through the full KKT system.

#include <Eigen/Dense>

#include <vector>

namespace oracle {

struct DeepcInstance {
  std::vector<double> u_data;  // N samples
  std::vector<double> y_data;  // N + d samples
  int d = 2;
  std::vector<double> u_past;  // d samples, oldest first
  std::vector<double> y_past;  // d samples, oldest first
  int L = 6;
  double q = 1.0;
  double r = 1.0;
  double w_alpha = 0.0;
  double lambda_sigma = 1.0;
};

struct DeepcSolution {
  Eigen::VectorXd u;      // L inputs
  Eigen::VectorXd y;      // L outputs
  Eigen::VectorXd alpha;
  Eigen::VectorXd sigma;
  double cost = 0.0;
};

inline DeepcSolution solve_deepc(const DeepcInstance& in) {
  const int N = static_cast<int>(in.u_data.size());
  const int d = in.d;
  const int L = in.L;
  const int na = N - L - d + 1;
  const int n_psi = L + d;            // one row per block
  const int n_xi = d * (L + d + 1);   // d rows per block
  const int ns = n_psi + n_xi;
  const int nz = 2 * L + na + ns;
  const int iu = 0, iy = L, ia = 2 * L, is = 2 * L + na;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, nz);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ns);
  // Row: sum_c H(row, c) alpha_c - sigma_row - predicted(row) = 0.
  auto predicted_u = [&](int row, int k) {
    if (k < 0) b(row) += in.u_past[k + d];
    else A(row, iu + k) -= 1.0;
  };
  auto predicted_y = [&](int row, int k) {
    if (k < 0) b(row) += in.y_past[k + d];
    else if (k < L) A(row, iy + k) -= 1.0;
    // k >= L: terminal value 0
  };
  for (int blk = 0; blk < n_psi; ++blk) {
    const int row = blk;
    for (int c = 0; c < na; ++c) A(row, ia + c) = in.u_data[blk + c];
    A(row, is + row) = -1.0;
    predicted_u(row, blk - d);
  }
  for (int blk = 0; blk < L + d + 1; ++blk) {
    for (int j = 0; j < d; ++j) {
      const int row = n_psi + blk * d + j;
      for (int c = 0; c < na; ++c) A(row, ia + c) = in.y_data[blk + c + j];
      A(row, is + row) = -1.0;
      predicted_y(row, blk - d + j);
    }
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nz, nz);
  for (int k = 0; k < L; ++k) {
    P(iu + k, iu + k) = 2.0 * in.r;
    P(iy + k, iy + k) = 2.0 * in.q;
  }
  for (int c = 0; c < na; ++c) P(ia + c, ia + c) = 2.0 * in.w_alpha;
  for (int j = 0; j < ns; ++j) P(is + j, is + j) = 2.0 * in.lambda_sigma;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nz + ns, nz + ns);
  K.topLeftCorner(nz, nz) = P;
  K.topRightCorner(nz, ns) = A.transpose();
  K.bottomLeftCorner(ns, nz) = A;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nz + ns);
  rhs.tail(ns) = b;
  const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
  const Eigen::VectorXd z = sol.head(nz);

  DeepcSolution out;
  out.u = z.segment(iu, L);
  out.y = z.segment(iy, L);
  out.alpha = z.segment(ia, na);
  out.sigma = z.segment(is, ns);
  out.cost = 0.5 * z.dot(P * z);
  return out;
}

}  // namespace oracle
