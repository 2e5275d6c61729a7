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

#include <optional>

namespace ddnpc {

/**
 * Recorded input/output run of a plant.
 *
 * u holds N rows (one per sample, m columns). Output channel i holds
 * N + d_i samples since a length-N input sequence fixes channel i up to
 * index N + d_i - 1.
 */
struct Trajectory {
  Matrix u;
  std::vector<Vector> y;
  std::vector<int> d;
  bool noisy = false;
  double w_star_used = 0.0;
  std::optional<Seed> seed;

  [[nodiscard]] int length() const { return static_cast<int>(u.rows()); }
  [[nodiscard]] int m() const { return static_cast<int>(u.cols()); }
  [[nodiscard]] int n() const;
  [[nodiscard]] int d_max() const;

  /// Throws ContractError if channel lengths disagree with N + d_i.
  void validate() const;
};

}  // namespace ddnpc
