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

#include <vector>

namespace ddnpc {

class Dictionary;

/// Xi_k = [y_{1,[k,k+d_1-1]}; ...; y_{m,[k,k+d_m-1]}] taken from the stored outputs.
Vector lift(const Trajectory& traj, int k);

/// Lifted states for k in [k_begin, k_end), one per column (n x K).
Matrix lift_sequence(const Trajectory& traj, int k_begin, int k_end);

/// Inputs u_k for k in [k_begin, k_end), one per column (m x K).
Matrix input_sequence(const Trajectory& traj, int k_begin, int k_end);

/**
 * Depth-L block Hankel matrix of a sequence stored one sample per column
 * (eta x N). Result is (eta L) x (N - L + 1); block row j, column c holds z_{j+c}.
 */
Matrix build_hankel(const Matrix& seq, int L);

struct PeCertificate {
  bool satisfied = false;
  int rank = 0;
  int rows = 0;
  int cols = 0;
  double sigma_max = 0.0;
  /// Smallest of the eta L leading singular values (0 when the Hankel is too narrow).
  double sigma_min = 0.0;
};

/// Singular values below this fraction of sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-9;

/// Numerical rank of a matrix with the kRankTolerance relative threshold.
int numerical_rank(const Matrix& a);

/// PE of order L: rank(H_L(seq)) = eta L.
PeCertificate is_persistently_exciting(const Matrix& seq, int L);

/**
 * Rows of psi (r x K) that reproduce a linear combination of the rows of xi
 * (n x K) on the sample. Such features are lifted-state coordinates in
 * disguise; they obey the same shift recursion as Xi and can never be PE on
 * their own, while the Xi Hankel already carries them.
 */
std::vector<int> state_linear_rows(const Matrix& psi, const Matrix& xi);

/**
 * PE certificate of the data Psi sequence, ignoring state_linear_rows. This
 * is the richness condition for the Hankel representation of the plant.
 */
PeCertificate data_excitation(const Matrix& psi, const Matrix& xi, int L);

/// Adds i.i.d. uniform noise on [-w_star, w_star] to every output sample; inputs untouched.
Trajectory add_noise(const Trajectory& traj, double w_star, Seed seed);

struct RepresentationResidual {
  double residual = 0.0;
  Vector alpha;
};

/**
 * Checks whether the window `test` (L inputs, L + d_i outputs per channel) is
 * spanned by the noise-free data through
 *   [H_L(Psi(u, Xi)); H_{L+1}(Xi)] alpha = [Psi(u_bar, Xi_bar); Xi_bar].
 * alpha is the minimum-norm least-squares solution; the residual is its
 * Euclidean misfit. Throws PreconditionError unless data_excitation of order
 * L + n holds.
 */
RepresentationResidual nominal_representation_residual(const Trajectory& data,
                                                       const Dictionary& dict,
                                                       const Trajectory& test, int L);

}  // namespace ddnpc
