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

// Coefficient fitting and sampled estimates of the scalar constants the
// robust controller consumes.

#include "ddnpc/common.hpp"
#include "ddnpc/dictionary.hpp"
#include "ddnpc/trajectory.hpp"

#include "json.hpp"

#include <functional>
#include <string>

namespace ddnpc {

/// Inflation applied to the sampled approximation-error bound.
inline constexpr double kEpsInflation = 1.5;
/// Inflation applied to sampled Lipschitz and noise-gain constants.
inline constexpr double kLipschitzInflation = 1.25;
/// eps* estimates below this are reported as exactly zero.
inline constexpr double kEpsZeroThreshold = 1e-7;

struct DictionaryConstants {
  double eps_star = 0.0;
  double k_psi = 0.0;
  double k_xi = 0.0;
  double k_w = 0.0;
  Matrix g_matrix;
  double g_dagger_inf_norm = 0.0;
  /// Compact set over (u, Xi) on which the constants were sampled.
  Box omega_box;
  double c_pe = 0.0;
  /// Warnings collected while estimating (degenerate inputs, possible under-estimates).
  std::vector<std::string> notes;

  [[nodiscard]] double g_inf_norm() const;
};

nlohmann::json to_json(const DictionaryConstants& c);
DictionaryConstants constants_from_json(const nlohmann::json& j);

/**
 * Ridge least squares of the targets y_{i,k+d_i} on the features
 * Psi(u_k, Xi_k), k = 0..N-1. Returns G with one row per output. The ridge
 * weight is 1e-8 * trace(Psi Psi^T) / r. Throws FitError when the features
 * are rank deficient, naming the null-space directions.
 */
Matrix fit_coefficients(const Dictionary& dict, const Trajectory& data);

/// Targets v_{i,k} = y_{i,k+d_i} for k in [0, N); m x N.
Matrix synthetic_input_targets(const Trajectory& data);

/// max_{k,i} |y_{i,k+d_i} - g_i^T Psi_k| on the stored data.
double max_fit_residual(const Dictionary& dict, const Matrix& G, const Trajectory& data);

/// Inflated uniform bound on the approximation error from a noise-free validation run.
double estimate_eps_star(const Dictionary& dict, const Matrix& G, const Trajectory& validation);

/// Any map (u, Xi) -> R^p; used for Lipschitz estimates of Psi and Phi.
using VectorField = std::function<Vector(const Vector& u, const Vector& xi)>;

/**
 * Sampled Lipschitz constant of `g` in Xi (infinity norms) over the box
 * omega = (u, Xi) of dimension m + n. Even samples pair two uniform points,
 * odd samples use a short sign-pattern step to catch the local slope. The
 * maximum ratio is inflated by 1.25. Deterministic per seed; sample i uses
 * seed + i.
 */
double estimate_lipschitz(const VectorField& g, const Box& omega, int m, long n_samples, Seed seed);

/**
 * Noise-to-delta gain K_w: max over trials of ||delta(omega)||_inf / w_star
 * with delta = G Psi(u, Xi) + eps(u, Xi) - G Psi(u, Xi~) - eps(u, Xi~), inflated
 * by 1.25. eps(u, Xi) is the data residual; eps(u, Xi~) comes from `phi`
 * when given and is otherwise held at the clean residual. Returns 0 (and
 * appends a note) when w_star or n_trials is zero.
 */
double estimate_k_w(const Dictionary& dict, const Matrix& G, const Trajectory& data, double w_star,
                    long n_trials, Seed seed, const VectorField& phi = {},
                    std::vector<std::string>* notes = nullptr);

/// ||G^T (G G^T)^{-1}||_inf. Throws FitError if G lacks full row rank.
double g_dagger_inf_norm(const Matrix& G);

/**
 * Squared spectral norm of the pseudo-inverse of
 * [H_{L+d_max}(Psi(u, Xi)); H_1(Xi_{[0, N-L-d_max]})], i.e. 1 / sigma_min^2.
 * Throws PreconditionError if the stacked matrix lacks full row rank.
 */
double compute_c_pe(const Trajectory& data, const Dictionary& dict, int L, int d_max);

/// Per-coordinate hull of the (u_k, Xi_k) samples, widened by `margin` times its width.
Box omega_from_data(const Trajectory& data, double margin = 0.1);

struct EstimationOptions {
  long lipschitz_samples = 4000;
  long k_w_trials = 2000;
  Seed seed = 7;
  double omega_margin = 0.1;
};

/**
 * Full constant chain: G from `data` (the controller's, possibly noisy, data),
 * eps* from the noise-free `validation` run, K_Psi from the dictionary, K_Xi
 * from `phi` (or from G Psi when absent), K_w from `clean_data`, and c_pe.
 */
DictionaryConstants estimate_constants(const Dictionary& dict, const Trajectory& data,
                                       const Trajectory& clean_data, const Trajectory& validation,
                                       double w_star, int L, const VectorField& phi,
                                       const EstimationOptions& opts = {});

}  // namespace ddnpc
