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

// Data-parallel kernels. Each kernel has a plain serial reference in
// ddnpc::serial and an OpenMP version in ddnpc::omp; both must produce
// bit-identical results, which the unit tests check. The public API routes
// to the OpenMP versions when the library is built with OpenMP.

#include "ddnpc/common.hpp"

#include <functional>

namespace ddnpc {

/// Worker count used by the OpenMP kernels (1 without OpenMP).
int max_threads();

/// Sets the worker count for subsequent parallel regions; n <= 0 keeps the default.
void set_threads(int n);

namespace serial {

Matrix build_hankel(const Matrix& seq, int L);

/// Column c = fn(c) for c in [0, cols); fn must return a vector of `rows` entries.
Matrix map_columns(Eigen::Index rows, Eigen::Index cols,
                   const std::function<Vector(Eigen::Index)>& fn);

/// max over i in [0, count) of fn(i); 0 for an empty range.
double max_reduce(long count, const std::function<double(long)>& fn);

}  // namespace serial

namespace omp {

Matrix build_hankel(const Matrix& seq, int L);
Matrix map_columns(Eigen::Index rows, Eigen::Index cols,
                   const std::function<Vector(Eigen::Index)>& fn);
double max_reduce(long count, const std::function<double(long)>& fn);

}  // namespace omp

namespace par {

#if defined(DDNPC_HAVE_OPENMP)
using omp::build_hankel;
using omp::map_columns;
using omp::max_reduce;
#else
using serial::build_hankel;
using serial::map_columns;
using serial::max_reduce;
#endif

}  // namespace par

}  // namespace ddnpc
