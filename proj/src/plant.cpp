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
#include "ddnpc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddnpc {

namespace {
constexpr double kDivergenceLimit = 1e8;
}  // namespace

int Trajectory::n() const {
  int s = 0;
  for (int di : d) s += di;
  return s;
}

int Trajectory::d_max() const { return d.empty() ? 0 : *std::max_element(d.begin(), d.end()); }

void Trajectory::validate() const {
  require(static_cast<int>(d.size()) == m(), "trajectory: d has " + std::to_string(d.size()) +
                                                 " entries but u has " + std::to_string(m()) +
                                                 " columns");
  require(y.size() == d.size(), "trajectory: output channel count differs from m");
  for (std::size_t i = 0; i < d.size(); ++i) {
    require(d[i] >= 1, "trajectory: relative degree must be >= 1");
    require(y[i].size() == length() + d[i],
            "trajectory: channel " + std::to_string(i + 1) + " has " + std::to_string(y[i].size()) +
                " samples, expected N + d_i = " + std::to_string(length() + d[i]));
  }
}

PlantModel::PlantModel(std::string name, int n, int m, std::vector<int> d, TransitionMap f,
                       OutputMap h, PhiMap phi_true, Box input_box)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      d_(std::move(d)),
      f_(std::move(f)),
      h_(std::move(h)),
      phi_true_(std::move(phi_true)),
      input_box_(std::move(input_box)) {
  require(n_ >= 1 && m_ >= 1, "plant: dimensions must be positive");
  require(static_cast<int>(d_.size()) == m_, "plant: need one relative degree per output");
  int sum = 0;
  for (int di : d_) {
    require(di >= 1, "plant: relative degrees must be >= 1");
    sum += di;
  }
  require(sum == n_, "plant: relative degrees must sum to the state dimension");
  require(input_box_.dim() == m_, "plant: input box dimension must equal m");
}

int PlantModel::d_max() const { return *std::max_element(d_.begin(), d_.end()); }

Vector PlantModel::output(const Vector& x) const {
  require(x.size() == n_, "plant " + name_ + ": state has wrong dimension");
  return h_(x);
}

Vector PlantModel::step(const Vector& x, const Vector& u) const {
  require(x.size() == n_, "plant " + name_ + ": state has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(n_));
  require(u.size() == m_, "plant " + name_ + ": input has dimension " + std::to_string(u.size()) +
                              ", expected " + std::to_string(m_));
  return f_(x, u);
}

Trajectory PlantModel::simulate(const Vector& x0, const Matrix& u_seq) const {
  const int N = static_cast<int>(u_seq.rows());
  require(N >= 1, "simulate: need at least one input sample");
  require(u_seq.cols() == m_, "simulate: input sequence must have m columns");
  require(x0.size() == n_, "simulate: x0 has wrong dimension");

  Trajectory traj;
  traj.u = u_seq;
  traj.d = d_;
  traj.y.resize(m_);
  for (int i = 0; i < m_; ++i) traj.y[i].resize(N + d_[i]);

  const int dmax = d_max();
  Vector x = x0;
  const Vector u_hold = u_seq.row(N - 1).transpose();
  for (int k = 0; k < N + dmax; ++k) {
    const Vector y = h_(x);
    for (int i = 0; i < m_; ++i) {
      if (k < N + d_[i]) traj.y[i](k) = y(i);
    }
    if (k + 1 < N + dmax) x = f_(x, k < N ? Vector(u_seq.row(k).transpose()) : u_hold);
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > kDivergenceLimit)
      throw NumericalError("simulate: plant " + name_ + " diverged at sample " + std::to_string(k + 1) +
                           " (reduce the excitation amplitude)");
  }
  return traj;
}

Vector PlantModel::true_phi(const Vector& u, const Vector& xi) const {
  if (!phi_true_) throw UnsupportedError("plant " + name_ + " has no Phi oracle");
  require(u.size() == m_ && xi.size() == n_, "true_phi: dimension mismatch");
  return phi_true_(u, xi);
}

Vector PlantModel::lifted_state(const Vector& x) const {
  require(x.size() == n_, "lifted_state: state has wrong dimension");
  const int dmax = d_max();
  Matrix outs(m_, dmax);
  Vector xk = x;
  const Vector zero = Vector::Zero(m_);
  for (int j = 0; j < dmax; ++j) {
    outs.col(j) = h_(xk);
    if (j + 1 < dmax) xk = f_(xk, zero);
  }
  Vector xi(n_);
  int row = 0;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < d_[i]; ++j) xi(row++) = outs(i, j);
  return xi;
}

RelativeDegreeCheck check_relative_degree(const PlantModel& plant, const Vector& x,
                                          const Vector& u, double step, double tol) {
  const int m = plant.m();
  const int horizon = plant.d_max() + 1;
  auto run = [&](const Vector& u0) {
    Matrix outs(m, horizon);
    Vector xk = x;
    for (int j = 0; j < horizon; ++j) {
      outs.col(j) = plant.output(xk);
      xk = plant.step(xk, j == 0 ? u0 : Vector(Vector::Zero(m)));
    }
    return outs;
  };
  const Matrix base = run(u);

  RelativeDegreeCheck result;
  std::ostringstream msg;
  Vector moved = Vector::Zero(m);
  for (int j = 0; j < m; ++j) {
    Vector up = u;
    up(j) += step;
    const Matrix delta = (run(up) - base).cwiseAbs();
    for (int i = 0; i < m; ++i) {
      const int di = plant.d()[i];
      for (int k = 0; k < di; ++k) {
        if (delta(i, k) > tol) {
          result.passed = false;
          msg << "output " << i + 1 << " sample " << k << " reacts to input " << j + 1 << "; ";
        }
      }
      moved(i) = std::max(moved(i), delta(i, di));
    }
  }
  for (int i = 0; i < m; ++i) {
    if (moved(i) <= 1e-3 * step) {
      result.passed = false;
      msg << "output " << i + 1 << " sample d_i does not react to any input; ";
    }
  }
  result.detail = msg.str();
  return result;
}

namespace {

Box default_box(int m) { return Box::symmetric(m, 5.0); }

PlantModel make_p1() {
  return PlantModel(
      "P1", 2, 1, {2},
      [](const Vector& x, const Vector& u) {
        Vector xn(2);
        xn << x(1), 0.8 * x(1) + 0.2 * x(0) * x(0) + u(0);
        return xn;
      },
      [](const Vector& x) { return Vector::Constant(1, x(0)); },
      [](const Vector& u, const Vector& xi) {
        return Vector::Constant(1, 0.2 * xi(0) * xi(0) + 0.8 * xi(1) + u(0));
      },
      default_box(1));
}

// P1 plus a term the default dictionary cannot represent.
PlantModel make_p2() {
  return PlantModel(
      "P2", 2, 1, {2},
      [](const Vector& x, const Vector& u) {
        Vector xn(2);
        xn << x(1), 0.8 * x(1) + 0.2 * x(0) * x(0) + 0.1 * std::sin(x(0)) + u(0);
        return xn;
      },
      [](const Vector& x) { return Vector::Constant(1, x(0)); },
      [](const Vector& u, const Vector& xi) {
        return Vector::Constant(1, 0.2 * xi(0) * xi(0) + 0.8 * xi(1) + 0.1 * std::sin(xi(0)) + u(0));
      },
      default_box(1));
}

// Two outputs with relative degrees (2, 1); x = (x1, x2, x3), y = (x1, x3).
PlantModel make_p3() {
  auto phi = [](const Vector& u, const Vector& xi) {
    Vector v(2);
    v << 0.5 * xi(1) + 0.1 * xi(0) * xi(0) + u(0) + 0.2 * u(1),
        0.6 * xi(2) + 0.1 * xi(0) * xi(2) + 0.3 * u(0) + u(1);
    return v;
  };
  return PlantModel(
      "P3", 3, 2, {2, 1},
      [phi](const Vector& x, const Vector& u) {
        const Vector v = phi(u, x);
        Vector xn(3);
        xn << x(1), v(0), v(1);
        return xn;
      },
      [](const Vector& x) {
        Vector y(2);
        y << x(0), x(2);
        return y;
      },
      phi, default_box(2));
}

// Linear time-invariant chain: x1+ = x2, x2+ = -0.2 x1 + 0.5 x2 + u.
PlantModel make_lti() {
  return PlantModel(
      "LTI", 2, 1, {2},
      [](const Vector& x, const Vector& u) {
        Vector xn(2);
        xn << x(1), -0.2 * x(0) + 0.5 * x(1) + u(0);
        return xn;
      },
      [](const Vector& x) { return Vector::Constant(1, x(0)); },
      [](const Vector& u, const Vector& xi) {
        return Vector::Constant(1, -0.2 * xi(0) + 0.5 * xi(1) + u(0));
      },
      default_box(1));
}

}  // namespace

const std::map<std::string, PlantModel>& builtin_plants() {
  static const std::map<std::string, PlantModel> registry = [] {
    std::map<std::string, PlantModel> r;
    for (auto p : {make_p1(), make_p2(), make_p3(), make_lti()}) r.emplace(p.name(), p);
    return r;
  }();
  return registry;
}

const PlantModel& find_plant(const std::string& name) {
  const auto& reg = builtin_plants();
  auto it = reg.find(name);
  if (it == reg.end()) throw LookupError("unknown plant id '" + name + "'");
  return it->second;
}

}  // namespace ddnpc
