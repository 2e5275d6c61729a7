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

// Independent reference computations for the tests. Nothing here calls the
// library's numerical kernels.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

/// Exact rank of an integer matrix by Gaussian elimination over the rationals.
inline int exact_rank(const std::vector<std::vector<std::int64_t>>& a) {
  using Q = boost::multiprecision::cpp_rational;
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<std::vector<Q>> m(rows, std::vector<Q>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m[i][j] = a[i][j];
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int i = rank + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      const Q f = m[i][c] / m[rank][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Depth-L block Hankel of an integer sequence (eta x N, one sample per column), built entrywise.
inline std::vector<std::vector<std::int64_t>> int_hankel(const std::vector<std::vector<std::int64_t>>& seq, int L) {
  const int eta = static_cast<int>(seq.size());
  const int N = static_cast<int>(seq[0].size());
  std::vector<std::vector<std::int64_t>> h(eta * L, std::vector<std::int64_t>(N - L + 1));
  for (int blk = 0; blk < L; ++blk)
    for (int e = 0; e < eta; ++e)
      for (int c = 0; c < N - L + 1; ++c) h[blk * eta + e][c] = seq[e][blk + c];
  return h;
}

/// Pseudo-inverse by SVD with a relative cutoff.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel = 1e-12) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::MatrixXd sinv = Eigen::MatrixXd::Zero(a.cols(), a.rows());
  const double cut = s.size() ? rel * s(0) : 0.0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) sinv(i, i) = 1.0 / s(i);
  return svd.matrixV() * sinv * svd.matrixU().transpose();
}

struct EqQpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
};

/**
 * min 1/2 x'Px + q'x s.t. Ax = b by null-space elimination:
 * x = A^+ b + Z w with Z spanning ker A, then (Z'PZ) w = -Z'(P x_p + q).
 */
inline EqQpResult equality_qp(const Eigen::MatrixXd& P, const Eigen::VectorXd& q, const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b) {
  const int n = static_cast<int>(q.size());
  Eigen::VectorXd xp = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  if (A.rows() > 0) {
    xp = pinv(A) * b;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > 1e-12 * s(0)) ++rank;
    Z = svd.matrixV().rightCols(n - rank);
  }
  EqQpResult r;
  if (Z.cols() > 0) {
    const Eigen::MatrixXd red = Z.transpose() * P * Z;
    const Eigen::VectorXd w = -pinv(red) * (Z.transpose() * (P * xp + q));
    r.x = xp + Z * w;
  } else {
    r.x = xp;
  }
  r.objective = 0.5 * r.x.dot(P * r.x) + q.dot(r.x);
  return r;
}

}  // namespace oracle
