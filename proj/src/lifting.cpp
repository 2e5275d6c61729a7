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
#include "ddnpc/lifting.hpp"

#include "ddnpc/dictionary.hpp"
#include "ddnpc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ddnpc {

Vector lift(const Trajectory& traj, int k) {
  const int m = traj.m();
  Vector xi(traj.n());
  int row = 0;
  for (int i = 0; i < m; ++i) {
    const int di = traj.d[i];
    if (k < 0 || k + di > traj.y[i].size())
      throw IndexError("lift: Xi_" + std::to_string(k) + " needs output " + std::to_string(i + 1) +
                       " up to index " + std::to_string(k + di - 1) + " but only " +
                       std::to_string(traj.y[i].size()) + " samples are stored");
    xi.segment(row, di) = traj.y[i].segment(k, di);
    row += di;
  }
  return xi;
}

Matrix lift_sequence(const Trajectory& traj, int k_begin, int k_end) {
  require(k_end >= k_begin, "lift_sequence: empty or reversed range");
  Matrix out(traj.n(), k_end - k_begin);
  for (int k = k_begin; k < k_end; ++k) out.col(k - k_begin) = lift(traj, k);
  return out;
}

Matrix input_sequence(const Trajectory& traj, int k_begin, int k_end) {
  if (k_begin < 0 || k_end > traj.length() || k_end < k_begin)
    throw IndexError("input_sequence: range [" + std::to_string(k_begin) + ", " +
                     std::to_string(k_end) + ") outside the " + std::to_string(traj.length()) +
                     " stored inputs");
  return traj.u.middleRows(k_begin, k_end - k_begin).transpose();
}

Matrix build_hankel(const Matrix& seq, int L) { return par::build_hankel(seq, L); }

int numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double thresh = kRankTolerance * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++rank;
  return rank;
}

PeCertificate is_persistently_exciting(const Matrix& seq, int L) {
  const Matrix H = build_hankel(seq, L);
  PeCertificate cert;
  cert.rows = static_cast<int>(H.rows());
  cert.cols = static_cast<int>(H.cols());
  Eigen::BDCSVD<Matrix> svd(H);
  const Vector& s = svd.singularValues();
  cert.sigma_max = s.size() > 0 ? s(0) : 0.0;
  const double thresh = kRankTolerance * cert.sigma_max;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh && cert.sigma_max > 0.0) ++cert.rank;
  cert.sigma_min = cert.cols >= cert.rows ? s(cert.rows - 1) : 0.0;
  cert.satisfied = cert.rank == cert.rows;
  return cert;
}

Trajectory add_noise(const Trajectory& traj, double w_star, Seed seed) {
  if (!(w_star >= 0.0)) throw ArgumentError("add_noise: w_star must be >= 0");
  require(!traj.noisy, "add_noise: trajectory is already noisy");
  Trajectory out = traj;
  if (w_star == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-w_star, w_star);
  for (auto& channel : out.y)
    for (Eigen::Index k = 0; k < channel.size(); ++k) channel(k) += dist(rng);
  out.noisy = true;
  out.w_star_used = w_star;
  out.seed = seed;
  return out;
}

std::vector<int> state_linear_rows(const Matrix& psi, const Matrix& xi) {
  require(psi.cols() == xi.cols(), "state_linear_rows: sample counts differ");
  std::vector<int> rows;
  if (psi.cols() == 0) return rows;
  // Project every feature row onto the row space of xi.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xi.transpose());
  for (Eigen::Index j = 0; j < psi.rows(); ++j) {
    const Vector f = psi.row(j).transpose();
    const double scale = f.norm();
    if (!(scale > 0.0)) continue;
    const Vector coef = cod.solve(f);
    if ((xi.transpose() * coef - f).norm() <= kRankTolerance * scale * std::sqrt(static_cast<double>(f.size())))
      rows.push_back(static_cast<int>(j));
  }
  return rows;
}

PeCertificate data_excitation(const Matrix& psi, const Matrix& xi, int L) {
  const std::vector<int> skip = state_linear_rows(psi, xi);
  std::vector<int> keep;
  for (int j = 0; j < psi.rows(); ++j)
    if (std::find(skip.begin(), skip.end(), j) == skip.end()) keep.push_back(j);
  return is_persistently_exciting(psi(keep, Eigen::all), L);
}

RepresentationResidual nominal_representation_residual(const Trajectory& data,
                                                       const Dictionary& dict,
                                                       const Trajectory& test, int L) {
  data.validate();
  test.validate();
  require(!data.noisy && !test.noisy, "representation residual: trajectories must be noise-free");
  require(test.length() == L, "representation residual: test window must hold exactly L inputs");
  require(test.d == data.d, "representation residual: relative degrees differ");
  const int N = data.length();
  const int n = data.n();

  const Matrix psi = dict.evaluate_sequence(data, 0, N);
  const PeCertificate pe = data_excitation(psi, lift_sequence(data, 0, N), L + n);
  if (!pe.satisfied)
    throw PreconditionError("representation residual: excited Psi data is not PE of order L + n = " +
                            std::to_string(L + n) + " (rank " + std::to_string(pe.rank) + " of " +
                            std::to_string(pe.rows) + ")");

  const Matrix h_psi = build_hankel(psi, L);
  const Matrix h_xi = build_hankel(lift_sequence(data, 0, N + 1), L + 1);
  Matrix stacked(h_psi.rows() + h_xi.rows(), h_psi.cols());
  stacked << h_psi, h_xi;

  const Matrix psi_bar = dict.evaluate_sequence(test, 0, L);
  const Matrix xi_bar = lift_sequence(test, 0, L + 1);
  Vector rhs(stacked.rows());
  rhs << psi_bar.reshaped(), xi_bar.reshaped();

  RepresentationResidual out;
  out.alpha = stacked.completeOrthogonalDecomposition().solve(rhs);
  out.residual = (stacked * out.alpha - rhs).norm();
  return out;
}

}  // namespace ddnpc
