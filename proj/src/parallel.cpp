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
#include "ddnpc/parallel.hpp"

#include <algorithm>
#include <vector>

#if defined(DDNPC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace ddnpc {

int max_threads() {
#if defined(DDNPC_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#if defined(DDNPC_HAVE_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

void check_hankel_args(const Matrix& seq, int L) {
  if (L < 1 || L > seq.cols())
    throw ArgumentError("build_hankel: depth L = " + std::to_string(L) +
                        " must satisfy 1 <= L <= N = " + std::to_string(seq.cols()));
}

}  // namespace

namespace serial {

Matrix build_hankel(const Matrix& seq, int L) {
  check_hankel_args(seq, L);
  const Eigen::Index eta = seq.rows();
  const Eigen::Index width = seq.cols() - L + 1;
  Matrix H(eta * L, width);
  for (Eigen::Index c = 0; c < width; ++c)
    for (int j = 0; j < L; ++j) H.block(j * eta, c, eta, 1) = seq.col(c + j);
  return H;
}

Matrix map_columns(Eigen::Index rows, Eigen::Index cols,
                   const std::function<Vector(Eigen::Index)>& fn) {
  Matrix out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) out.col(c) = fn(c);
  return out;
}

double max_reduce(long count, const std::function<double(long)>& fn) {
  double best = 0.0;
  for (long i = 0; i < count; ++i) best = std::max(best, fn(i));
  return best;
}

}  // namespace serial

namespace omp {

Matrix build_hankel(const Matrix& seq, int L) {
  check_hankel_args(seq, L);
  const Eigen::Index eta = seq.rows();
  const Eigen::Index width = seq.cols() - L + 1;
  Matrix H(eta * L, width);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < width; ++c)
    for (int j = 0; j < L; ++j) H.block(j * eta, c, eta, 1) = seq.col(c + j);
  return H;
}

Matrix map_columns(Eigen::Index rows, Eigen::Index cols,
                   const std::function<Vector(Eigen::Index)>& fn) {
  Matrix out(rows, cols);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) out.col(c) = fn(c);
  return out;
}

// max is exact under any association, so the parallel reduction matches the serial one bit for bit.
double max_reduce(long count, const std::function<double(long)>& fn) {
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (long i = 0; i < count; ++i) best = std::max(best, fn(i));
  return best;
}

}  // namespace omp

}  // namespace ddnpc
