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
#include "ddnpc/constants.hpp"

#include "ddnpc/lifting.hpp"
#include "ddnpc/parallel.hpp"

#include <algorithm>
#include <iostream>
#include <random>
#include <sstream>

namespace ddnpc {

double DictionaryConstants::g_inf_norm() const {
  return g_matrix.size() == 0 ? 0.0 : g_matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

nlohmann::json matrix_to_json(const Matrix& a) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    std::vector<double> row(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) row[j] = a(i, j);
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Matrix a(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw IoError("matrix rows have unequal length");
    for (std::size_t k = 0; k < rows[i].size(); ++k) a(i, k) = rows[i][k];
  }
  return a;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const DictionaryConstants& c) {
  nlohmann::json j;
  j["eps_star"] = c.eps_star;
  j["k_psi"] = c.k_psi;
  j["k_xi"] = c.k_xi;
  j["k_w"] = c.k_w;
  j["g_matrix"] = matrix_to_json(c.g_matrix);
  j["g_dagger_inf_norm"] = c.g_dagger_inf_norm;
  j["omega_box"] = {{"lower", to_std(c.omega_box.lower)}, {"upper", to_std(c.omega_box.upper)}};
  j["c_pe"] = c.c_pe;
  j["notes"] = c.notes;
  return j;
}

DictionaryConstants constants_from_json(const nlohmann::json& j) {
  DictionaryConstants c;
  c.eps_star = j.at("eps_star").get<double>();
  c.k_psi = j.at("k_psi").get<double>();
  c.k_xi = j.at("k_xi").get<double>();
  c.k_w = j.at("k_w").get<double>();
  c.g_matrix = matrix_from_json(j.at("g_matrix"));
  c.g_dagger_inf_norm = j.at("g_dagger_inf_norm").get<double>();
  c.omega_box.lower = to_eigen(j.at("omega_box").at("lower").get<std::vector<double>>());
  c.omega_box.upper = to_eigen(j.at("omega_box").at("upper").get<std::vector<double>>());
  c.c_pe = j.value("c_pe", 0.0);
  if (j.contains("notes")) c.notes = j.at("notes").get<std::vector<std::string>>();
  return c;
}

Matrix synthetic_input_targets(const Trajectory& data) {
  const int N = data.length();
  Matrix v(data.m(), N);
  for (int i = 0; i < data.m(); ++i) v.row(i) = data.y[i].segment(data.d[i], N).transpose();
  return v;
}

Matrix fit_coefficients(const Dictionary& dict, const Trajectory& data) {
  data.validate();
  const int N = data.length();
  const int r = dict.r();
  if (N <= r)
    throw FitError("fit: need N > r samples (N = " + std::to_string(N) + ", r = " + std::to_string(r) + ")");
  const Matrix F = dict.evaluate_sequence(data, 0, N);
  const Matrix V = synthetic_input_targets(data);

  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const double thresh = kRankTolerance * (s.size() > 0 ? s(0) : 0.0);
  std::ostringstream deficient;
  int missing = 0;
  for (int j = 0; j < r; ++j) {
    if (s(j) <= thresh || s(0) == 0.0) {
      ++missing;
      const Vector dir = svd.matrixU().col(j);
      deficient << " [";
      for (int q = 0; q < r; ++q) deficient << (q ? ", " : "") << dir(q);
      deficient << "]";
    }
  }
  if (missing > 0)
    throw FitError("fit: features are rank deficient (" + std::to_string(r - missing) + " of " +
                   std::to_string(r) + "); basis combinations with no excitation:" + deficient.str());

  const Matrix gram = F * F.transpose();
  const double ridge = 1e-8 * gram.trace() / r;
  const Matrix rhs = F * V.transpose();
  const Eigen::LDLT<Matrix> lhs(gram + ridge * Matrix::Identity(r, r));
  // One iterated-Tikhonov pass: keeps the regularized solve but cuts the
  // ridge bias from O(ridge) to O(ridge^2), which matters when a feature
  // (xi_1^2 at small amplitude) is much weaker than the rest.
  Matrix g = lhs.solve(rhs);
  g += lhs.solve(rhs - gram * g);
  return g.transpose();
}

double max_fit_residual(const Dictionary& dict, const Matrix& G, const Trajectory& data) {
  const int N = data.length();
  if (N == 0) return 0.0;
  const Matrix resid = synthetic_input_targets(data) - G * dict.evaluate_sequence(data, 0, N);
  return resid.cwiseAbs().maxCoeff();
}

double estimate_eps_star(const Dictionary& dict, const Matrix& G, const Trajectory& validation) {
  require(!validation.noisy, "estimate_eps_star: validation run must be noise-free");
  const double eps = kEpsInflation * max_fit_residual(dict, G, validation);
  return eps < kEpsZeroThreshold ? 0.0 : eps;
}

double estimate_lipschitz(const VectorField& g, const Box& omega, int m, long n_samples, Seed seed) {
  const Eigen::Index dim = omega.dim();
  const int n = static_cast<int>(dim) - m;
  require(n >= 1 && m >= 0, "estimate_lipschitz: box must cover (u, Xi)");
  const Vector width = omega.upper - omega.lower;
  for (int q = 0; q < n; ++q)
    if (!(width(m + q) > 0.0)) throw ArgumentError("estimate_lipschitz: degenerate box in Xi");
  const double local_step = 1e-4 * width.tail(n).minCoeff();

  const double best = par::max_reduce(n_samples, [&](long i) {
    std::mt19937_64 rng(seed + static_cast<Seed>(i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector z(dim);
    for (Eigen::Index q = 0; q < dim; ++q) z(q) = omega.lower(q) + width(q) * unit(rng);
    const Vector u = z.head(m);
    const Vector xi = z.tail(n);
    Vector xi2(n);
    if (i % 2 == 0) {
      for (int q = 0; q < n; ++q) xi2(q) = omega.lower(m + q) + width(m + q) * unit(rng);
    } else {
      for (int q = 0; q < n; ++q) {
        double step = unit(rng) < 0.5 ? -local_step : local_step;
        if (xi(q) + step > omega.upper(m + q) || xi(q) + step < omega.lower(m + q)) step = -step;
        xi2(q) = xi(q) + step;
      }
    }
    const double dx = (xi2 - xi).lpNorm<Eigen::Infinity>();
    if (dx == 0.0) return 0.0;
    return (g(u, xi2) - g(u, xi)).lpNorm<Eigen::Infinity>() / dx;
  });
  return kLipschitzInflation * best;
}

double estimate_k_w(const Dictionary& dict, const Matrix& G, const Trajectory& data, double w_star,
                    long n_trials, Seed seed, const VectorField& phi,
                    std::vector<std::string>* notes) {
  if (w_star == 0.0 || n_trials == 0) {
    const std::string msg = "K_w: no noise trials (w* = 0 or zero trials); reporting 0";
    if (notes) notes->push_back(msg);
    else std::clog << "warning: " << msg << '\n';
    return 0.0;
  }
  if (w_star < 0.0) throw ArgumentError("estimate_k_w: w_star must be >= 0");
  require(!data.noisy, "estimate_k_w: data must be noise-free");
  const int N = data.length();
  const int n = data.n();
  require(N >= 1, "estimate_k_w: empty data");
  const Matrix V = synthetic_input_targets(data);

  const double best = par::max_reduce(n_trials, [&](long i) {
    std::mt19937_64 rng(seed + static_cast<Seed>(i));
    std::uniform_int_distribution<int> pick(0, N - 1);
    std::uniform_real_distribution<double> noise(-w_star, w_star);
    const int k = pick(rng);
    const Vector u = data.u.row(k).transpose();
    const Vector xi = lift(data, k);
    Vector omega(n);
    for (int q = 0; q < n; ++q) omega(q) = noise(rng);
    const Vector xi_noisy = xi + omega;
    const Vector fit_clean = G * dict.evaluate(u, xi);
    const Vector fit_noisy = G * dict.evaluate(u, xi_noisy);
    const Vector eps_clean = V.col(k) - fit_clean;
    const Vector eps_noisy = phi ? Vector(phi(u, xi_noisy) - fit_noisy) : eps_clean;
    const Vector delta = fit_clean + eps_clean - fit_noisy - eps_noisy;
    return delta.lpNorm<Eigen::Infinity>() / w_star;
  });
  return kLipschitzInflation * best;
}

double g_dagger_inf_norm(const Matrix& G) {
  require(G.rows() >= 1 && G.cols() >= G.rows(), "g_dagger_inf_norm: G must be wide (m <= r)");
  Eigen::JacobiSVD<Matrix> svd(G);
  const Vector& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(s(0) > 0.0) || smin <= kRankTolerance * s(0)) {
    std::ostringstream msg;
    msg << "G lacks full row rank (sigma_min = " << smin << ")";
    throw FitError(msg.str());
  }
  const Matrix gram = G * G.transpose();
  const Matrix pinv = G.transpose() * gram.llt().solve(Matrix::Identity(G.rows(), G.rows()));
  return pinv.cwiseAbs().rowwise().sum().maxCoeff();
}

double compute_c_pe(const Trajectory& data, const Dictionary& dict, int L, int d_max) {
  const int N = data.length();
  const int depth = L + d_max;
  if (depth > N) throw ArgumentError("compute_c_pe: L + d_max exceeds the data length");
  const Matrix psi = dict.evaluate_sequence(data, 0, N);
  const std::vector<int> skip = state_linear_rows(psi, lift_sequence(data, 0, N));
  std::vector<int> keep;
  for (int j = 0; j < psi.rows(); ++j)
    if (std::find(skip.begin(), skip.end(), j) == skip.end()) keep.push_back(j);
  const Matrix h_psi = build_hankel(psi(keep, Eigen::all), depth);
  const Matrix xi0 = lift_sequence(data, 0, N - depth + 1);
  Matrix stacked(h_psi.rows() + xi0.rows(), h_psi.cols());
  stacked << h_psi, xi0;
  Eigen::BDCSVD<Matrix> svd(stacked);
  const Vector& s = svd.singularValues();
  const Eigen::Index rows = stacked.rows();
  const double smin = stacked.cols() >= rows ? s(rows - 1) : 0.0;
  if (!(smin > kRankTolerance * s(0))) {
    std::ostringstream msg;
    msg << "c_pe: stacked Hankel lacks full row rank (sigma_min = " << smin << ", " << rows
        << " rows, " << stacked.cols() << " columns)";
    throw PreconditionError(msg.str());
  }
  return 1.0 / (smin * smin);
}

Box omega_from_data(const Trajectory& data, double margin) {
  const int N = data.length();
  Matrix z(data.m() + data.n(), N);
  z << input_sequence(data, 0, N), lift_sequence(data, 0, N);
  Vector lo = z.rowwise().minCoeff();
  Vector hi = z.rowwise().maxCoeff();
  const Vector pad = (margin * (hi - lo)).cwiseMax(1e-6);
  return {lo - pad, hi + pad};
}

DictionaryConstants estimate_constants(const Dictionary& dict, const Trajectory& data,
                                       const Trajectory& clean_data, const Trajectory& validation,
                                       double w_star, int L, const VectorField& phi,
                                       const EstimationOptions& opts) {
  DictionaryConstants c;
  c.g_matrix = fit_coefficients(dict, data);
  c.g_dagger_inf_norm = g_dagger_inf_norm(c.g_matrix);
  c.omega_box = omega_from_data(clean_data, opts.omega_margin);
  c.eps_star = estimate_eps_star(dict, c.g_matrix, validation);
  const VectorField psi = [&dict](const Vector& u, const Vector& xi) { return dict.evaluate(u, xi); };
  c.k_psi = estimate_lipschitz(psi, c.omega_box, dict.m(), opts.lipschitz_samples, opts.seed);
  const Matrix G = c.g_matrix;
  const VectorField surrogate = [&dict, G](const Vector& u, const Vector& xi) {
    return Vector(G * dict.evaluate(u, xi));
  };
  c.k_xi = estimate_lipschitz(phi ? phi : surrogate, c.omega_box, dict.m(), opts.lipschitz_samples,
                              opts.seed + 1);
  if (!phi) c.notes.push_back("K_Xi estimated from the fitted surrogate G Psi (no Phi oracle)");
  c.k_w = estimate_k_w(dict, c.g_matrix, clean_data, w_star, opts.k_w_trials, opts.seed + 2, phi,
                       &c.notes);
  c.c_pe = compute_c_pe(data, dict, L, data.d_max());
  c.notes.push_back("constants are sampled estimates and may under-estimate the true suprema");
  return c;
}

}  // namespace ddnpc
