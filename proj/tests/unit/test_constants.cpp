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
#include "doctest.h"

#include "oracles.hpp"

#include "ddnpc/constants.hpp"
#include "ddnpc/dictionary.hpp"
#include "ddnpc/experiment.hpp"
#include "ddnpc/plant.hpp"

#include <random>

using namespace ddnpc;

TEST_CASE("default dictionary of P1 evaluates xi_1^2, xi_2, u") {
  const Dictionary d = default_dictionary(find_plant("P1"));
  REQUIRE(d.r() == 3);
  Vector u(1), xi(2);
  u << 0.5;
  xi << 2.0, -1.0;
  const Vector v = d.evaluate(u, xi);
  CHECK(v(0) == doctest::Approx(4.0));
  CHECK(v(1) == doctest::Approx(-1.0));
  CHECK(v(2) == doctest::Approx(0.5));
}

TEST_CASE("monomial counts and Jacobian") {
  // m = 2, n = 3: 5 linear and 15 quadratic monomials.
  const Dictionary d = Dictionary::all_monomials(2, 3, 2);
  CHECK(d.r() == 20);
  CHECK(default_dictionary(find_plant("P3")).r() == 20);
  CHECK(default_dictionary(find_plant("LTI")).r() == 1);

  const Dictionary p1 = default_dictionary(find_plant("P1"));
  Vector u(1), xi(2);
  u << 0.2;
  xi << 0.7, -0.4;
  const Matrix J = p1.jacobian(u, xi);
  Matrix expect = Matrix::Zero(3, 3);  // columns (u, xi_1, xi_2)
  expect(0, 1) = 2 * 0.7;
  expect(1, 2) = 1.0;
  expect(2, 0) = 1.0;
  CHECK((J - expect).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("dictionary descriptor round trip") {
  std::vector<Vector> centers{Vector::Zero(3), Vector::Ones(3)};
  const Dictionary rbf = Dictionary::radial(1, 2, centers, {0.5, 1.5});
  const Dictionary mono = default_dictionary(find_plant("P1"));
  Vector u(1), xi(2);
  u << 0.3;
  xi << -0.1, 0.9;
  for (const Dictionary& d : {rbf, mono}) {
    const Dictionary back = Dictionary::from_descriptor(d.descriptor());
    CHECK(back.r() == d.r());
    CHECK(back.evaluate(u, xi) == d.evaluate(u, xi));
  }
  CHECK(rbf.evaluate(Vector::Zero(1), Vector::Zero(2))(0) == doctest::Approx(1.0));
}

TEST_CASE("coefficients of P1 are recovered") {
  ExperimentConfig cfg;
  cfg.N = 200;
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const Dictionary dict = cfg.make_dictionary();
  const Matrix G = fit_coefficients(dict, b.clean);
  Matrix expect(1, 3);
  expect << 0.2, 0.8, 1.0;
  // The ridge weight biases G slightly; 1e-8 still holds on exact data.
  CHECK((G - expect).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(max_fit_residual(dict, G, b.clean) <= 1e-8);
  CHECK(estimate_eps_star(dict, G, b.validation) == 0.0);
}

TEST_CASE("pseudo-inverse norm agrees with the oracle") {
  Matrix G(2, 3);
  G << 1, 2, 0, 0, 1, 3;
  const Matrix pinv = oracle::pinv(G);
  CHECK(g_dagger_inf_norm(G) == doctest::Approx(pinv.cwiseAbs().rowwise().sum().maxCoeff()).epsilon(1e-12));
  Matrix deficient(2, 2);
  deficient << 1, 2, 2, 4;
  CHECK_THROWS_AS(g_dagger_inf_norm(deficient), FitError);
}

TEST_CASE("rank-deficient features are rejected by name") {
  const PlantModel& p = find_plant("P1");
  const Dictionary dup = Dictionary::monomial(1, 2, {{1, 0, 0}, {1, 0, 0}});
  const Trajectory tr = p.simulate(Vector::Zero(2), Matrix::Constant(30, 1, 0.01));
  CHECK_THROWS_AS(fit_coefficients(dup, tr), FitError);
}

TEST_CASE("P2 has a positive approximation error, P1 none") {
  ExperimentConfig cfg;
  cfg.plant = "P2";
  cfg.excitation.amplitude = 0.05;
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const DictionaryConstants c = fit_constants(cfg, cfg.make_dictionary(), b, 0.0, EpsSetting{});
  CHECK(c.eps_star > 0.0);
  CHECK(c.k_xi > 0.0);
  CHECK(c.c_pe > 0.0);

  ExperimentConfig c1;
  const DataBundle b1 = collect_data(c1, 0.0, 0);
  const DictionaryConstants k1 = fit_constants(c1, c1.make_dictionary(), b1, 0.0, EpsSetting{});
  CHECK(k1.eps_star == 0.0);
  CHECK(k1.k_w == 0.0);
  // P1's Phi has slope 2 * 0.2 |xi_1| + 0.8 in xi, inflated by 1.25.
  CHECK(k1.k_xi >= 0.8);
}

TEST_CASE("Lipschitz estimate of a linear map") {
  const VectorField lin = [](const Vector& u, const Vector& xi) { return Vector::Constant(1, 3.0 * xi(0) - xi(1) + u(0)); };
  const double k = estimate_lipschitz(lin, Box::symmetric(3, 1.0), 1, 2000, 5);
  CHECK(k <= kLipschitzInflation * 4.0 + 1e-9);
  CHECK(k >= kLipschitzInflation * 4.0 * 0.9);
  CHECK(estimate_lipschitz(lin, Box::symmetric(3, 1.0), 1, 2000, 5) == k);
}

TEST_CASE("fitted P1 model is exact on held-out data") {
  ExperimentConfig cfg;
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const Dictionary dict = cfg.make_dictionary();
  const Matrix G = fit_coefficients(dict, b.clean);
  CHECK(max_fit_residual(dict, G, b.validation) <= 1e-8);
}

TEST_CASE("Lipschitz estimates certify fresh pairs") {
  ExperimentConfig cfg;
  cfg.plant = "P2";
  cfg.excitation.amplitude = 0.05;
  const PlantModel& p = cfg.plant_model();
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 0.0, 0);
  const DictionaryConstants c = fit_constants(cfg, dict, b, 0.0, EpsSetting{});
  const Box& om = c.omega_box;
  std::mt19937_64 rng(1234);
  auto draw = [&] {
    Vector v(om.dim());
    for (Eigen::Index i = 0; i < om.dim(); ++i) v(i) = std::uniform_real_distribution<double>(om.lower(i), om.upper(i))(rng);
    return v;
  };
  int violations_psi = 0, violations_phi = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector a = draw();
    Vector bb = draw();
    bb.head(p.m()) = a.head(p.m());  // same input, different lifted state
    const Vector u = a.head(p.m());
    const Vector x1 = a.tail(a.size() - p.m()), x2 = bb.tail(bb.size() - p.m());
    const double dx = (x1 - x2).lpNorm<Eigen::Infinity>();
    if (dx == 0.0) continue;
    if ((dict.evaluate(u, x1) - dict.evaluate(u, x2)).lpNorm<Eigen::Infinity>() > c.k_psi * dx) ++violations_psi;
    if ((p.true_phi(u, x1) - p.true_phi(u, x2)).lpNorm<Eigen::Infinity>() > c.k_xi * dx) ++violations_phi;
  }
  CHECK(violations_psi == 0);
  CHECK(violations_phi == 0);
}

TEST_CASE("pseudo-inverse norm is invariant under row permutation") {
  Matrix G(3, 5);
  G << 1, 0.5, -2, 0, 1, 0, 1, 3, -1, 0.2, 2, -1, 0, 1, 1;
  Matrix swapped = G;
  swapped.row(0) = G.row(2);
  swapped.row(2) = G.row(0);
  CHECK(g_dagger_inf_norm(swapped) == doctest::Approx(g_dagger_inf_norm(G)).epsilon(1e-12));
}
