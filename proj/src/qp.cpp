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
#include "ddnpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ddnpc {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::MaxIterations: return "max-iters";
    case QpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal_equality, primal_inequality, complementarity, dual_sign});
}

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double data_scale(const Matrix& P) {
  return P.size() == 0 ? 1.0 : std::max(1.0, P.diagonal().cwiseAbs().maxCoeff());
}

}  // namespace

KktResiduals kkt_residuals(const QpProblem& qp, const Vector& x, const Vector& y, const Vector& z) {
  KktResiduals r;
  Vector grad = qp.P * x + qp.q;
  if (qp.A.rows() > 0) {
    grad += qp.A.transpose() * y;
    r.primal_equality = inf_norm(qp.A * x - qp.b);
  }
  if (qp.G.rows() > 0) {
    grad += qp.G.transpose() * z;
    const Vector slack = qp.h - qp.G * x;
    r.primal_inequality = std::max(0.0, -slack.minCoeff());
    r.complementarity = inf_norm(z.cwiseProduct(slack));
    r.dual_sign = std::max(0.0, -z.minCoeff());
  }
  r.stationarity = inf_norm(grad);
  return r;
}

namespace {

// Saddle-point system [H A^T; A 0] solved through a regularized LU with
// iterative refinement against the exact matrix.
class SaddleSolver {
 public:
  // `scale` should come from the problem data, not from H: barrier terms
  // make diag(H) blow up near the boundary and the shift would swamp P.
  SaddleSolver(const Matrix& H, const Matrix& A, double reg, double scale) : n_(H.rows()), p_(A.rows()) {
    K_.setZero(n_ + p_, n_ + p_);
    K_.topLeftCorner(n_, n_) = H;
    if (p_ > 0) {
      K_.topRightCorner(n_, p_) = A.transpose();
      K_.bottomLeftCorner(p_, n_) = A;
    }
    Matrix Kreg = K_;
    Kreg.diagonal().head(n_).array() += reg * scale;
    Kreg.diagonal().tail(p_).array() -= reg * scale;
    lu_.compute(Kreg);
  }

  [[nodiscard]] Vector solve(const Vector& rhs, int refine = 10) const {
    Vector sol = lu_.solve(rhs);
    double last = std::numeric_limits<double>::infinity();
    for (int i = 0; i < refine; ++i) {
      const Vector res = rhs - K_ * sol;
      const double norm = inf_norm(res);
      if (!(norm < last) || norm <= 1e-15 * (1.0 + inf_norm(rhs))) break;
      last = norm;
      sol += lu_.solve(res);
    }
    return sol;
  }

 private:
  Eigen::Index n_;
  Eigen::Index p_;
  Matrix K_;
  Eigen::PartialPivLU<Matrix> lu_;
};

bool all_finite(const Vector& v) { return v.allFinite(); }

double max_step(const Vector& v, const Vector& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

struct IpmResult {
  QpStatus status = QpStatus::MaxIterations;
  Vector x, y, z, s;
  int iterations = 0;
  bool diverged = false;
};

// Core interior-point loop; assumes A has full row rank.
IpmResult run_ipm(const QpProblem& qp, const QpSettings& st) {
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index p = qp.A.rows();
  const Eigen::Index mi = qp.G.rows();
  IpmResult res;

  const Matrix Gt = mi > 0 ? Matrix(qp.G.transpose()) : Matrix(n, 0);
  {
    // Start from the minimizer of 1/2 x'Px + q'x + 1/2 ||Gx - h||^2 on Ax = b.
    Matrix H0 = qp.P;
    Vector rhs(n + p);
    rhs.head(n) = -qp.q;
    if (mi > 0) {
      H0 += Gt * qp.G;
      rhs.head(n) += Gt * qp.h;
    }
    if (p > 0) rhs.tail(p) = qp.b;
    const SaddleSolver kkt(H0, qp.A, st.regularization, data_scale(H0));
    const Vector sol = kkt.solve(rhs);
    res.x = sol.head(n);
    res.y = sol.tail(p);
  }
  if (mi == 0) {
    res.z.resize(0);
    res.s.resize(0);
    res.status = all_finite(res.x) ? QpStatus::Optimal : QpStatus::NumericalFailure;
    return res;
  }
  {
    const Vector s_hat = qp.h - qp.G * res.x;
    const double as = -s_hat.minCoeff();
    res.s = as < 0.0 ? s_hat : Vector(s_hat.array() + 1.0 + as);
    const Vector z_hat = -s_hat;
    const double az = -z_hat.minCoeff();
    res.z = az < 0.0 ? z_hat : Vector(z_hat.array() + 1.0 + az);
  }

  Vector& x = res.x;
  Vector& y = res.y;
  Vector& z = res.z;
  Vector& s = res.s;
  const double q_scale = 1.0 + inf_norm(qp.q);
  const double b_scale = 1.0 + inf_norm(qp.b);
  const double h_scale = 1.0 + inf_norm(qp.h);
  const double x0_scale = 1.0 + inf_norm(x);

  for (int it = 0; it < st.max_iters; ++it) {
    res.iterations = it;
    Vector r_d = qp.P * x + qp.q + Gt * z;
    if (p > 0) r_d += qp.A.transpose() * y;
    const Vector r_p = p > 0 ? Vector(qp.A * x - qp.b) : Vector();
    const Vector r_g = qp.G * x + s - qp.h;
    const double gap = s.dot(z);
    const double mu = gap / static_cast<double>(mi);
    const double obj = qp.objective(x);

    if (inf_norm(r_d) <= st.tol * q_scale && inf_norm(r_p) <= st.tol * b_scale &&
        inf_norm(r_g) <= st.tol * h_scale && gap <= st.tol * (1.0 + std::abs(obj))) {
      res.status = QpStatus::Optimal;
      return res;
    }
    if (!all_finite(x) || !all_finite(z)) {
      res.status = QpStatus::NumericalFailure;
      return res;
    }
    if (inf_norm(x) > 1e10 * x0_scale) {
      res.diverged = true;
      res.status = QpStatus::MaxIterations;
      return res;
    }

    const Vector d = z.cwiseQuotient(s);
    const Matrix H = qp.P + Gt * d.asDiagonal() * qp.G;
    const SaddleSolver kkt(H, qp.A, st.regularization, data_scale(qp.P));

    auto direction = [&](const Vector& r_c, Vector& dx, Vector& dy, Vector& dz, Vector& ds) {
      Vector rhs(n + p);
      const Vector t = (r_c + z.cwiseProduct(r_g)).cwiseQuotient(s);
      rhs.head(n) = -r_d - Gt * t;
      if (p > 0) rhs.tail(p) = -r_p;
      const Vector sol = kkt.solve(rhs);
      dx = sol.head(n);
      dy = sol.tail(p);
      const Vector Gdx = qp.G * dx;
      dz = t + d.cwiseProduct(Gdx);
      ds = -r_g - Gdx;
    };

    Vector dx, dy, dz, ds;
    const Vector sz = s.cwiseProduct(z);
    direction(-sz, dx, dy, dz, ds);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(mi);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    const Vector r_c = -sz - ds.cwiseProduct(dz) + Vector::Constant(mi, sigma * mu);
    direction(r_c, dx, dy, dz, ds);
    const double a = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));

    x += a * dx;
    if (p > 0) y += a * dy;
    z += a * dz;
    s += a * ds;
  }
  res.iterations = st.max_iters;
  res.status = QpStatus::MaxIterations;
  return res;
}

// Solves the KKT system with the inequalities in `active` held as equalities.
bool polish(const QpProblem& qp, const QpSettings& st, Vector& x, Vector& y, Vector& z) {
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index p = qp.A.rows();
  const Eigen::Index mi = qp.G.rows();
  const Vector slack = qp.h - qp.G * x;
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < mi; ++i)
    if (z(i) > slack(i)) active.push_back(i);
  const Eigen::Index na = static_cast<Eigen::Index>(active.size());

  Matrix Aeq(p + na, n);
  Vector beq(p + na);
  if (p > 0) {
    Aeq.topRows(p) = qp.A;
    beq.head(p) = qp.b;
  }
  for (Eigen::Index k = 0; k < na; ++k) {
    Aeq.row(p + k) = qp.G.row(active[k]);
    beq(p + k) = qp.h(active[k]);
  }
  const SaddleSolver kkt(qp.P, Aeq, st.regularization, data_scale(qp.P));
  Vector rhs(n + p + na);
  rhs << -qp.q, beq;
  const Vector sol = kkt.solve(rhs, 5);
  if (!sol.allFinite()) return false;

  Vector xp = sol.head(n);
  Vector yp = sol.segment(n, p);
  Vector zp = Vector::Zero(mi);
  for (Eigen::Index k = 0; k < na; ++k) zp(active[k]) = sol(n + p + k);

  const KktResiduals before = kkt_residuals(qp, x, y, z);
  const KktResiduals after = kkt_residuals(qp, xp, yp, zp);
  if (after.max() > before.max()) return false;
  x = std::move(xp);
  y = std::move(yp);
  z = std::move(zp);
  return true;
}

}  // namespace

QpSolution solve_qp(const QpProblem& qp_in, const QpSettings& settings) {
  const Eigen::Index n = qp_in.num_vars();
  require(qp_in.P.rows() == n && qp_in.P.cols() == n, "qp: P must be n x n");
  require(qp_in.A.rows() == qp_in.b.size() && (qp_in.A.rows() == 0 || qp_in.A.cols() == n),
          "qp: A/b shape mismatch");
  require(qp_in.G.rows() == qp_in.h.size() && (qp_in.G.rows() == 0 || qp_in.G.cols() == n),
          "qp: G/h shape mismatch");

  QpProblem qp = qp_in;
  if (qp.A.rows() == 0) qp.A.resize(0, n);
  if (qp.G.rows() == 0) qp.G.resize(0, n);
  qp.P = 0.5 * (qp.P + qp.P.transpose());

  QpSolution out;
  const Eigen::Index p_full = qp.A.rows();

  // Drop linearly dependent equality rows; detect inconsistent ones.
  std::vector<Eigen::Index> kept;
  if (p_full > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(qp.A.transpose());
    qr.setThreshold(1e-11);
    const Eigen::Index rank = qr.rank();
    for (Eigen::Index k = 0; k < rank; ++k) kept.push_back(qr.colsPermutation().indices()(k));
    std::sort(kept.begin(), kept.end());
    const Vector x_ls = qp.A.completeOrthogonalDecomposition().solve(qp.b);
    const double misfit = inf_norm(qp.A * x_ls - qp.b);
    if (misfit > 1e-9 * (1.0 + inf_norm(qp.b))) {
      out.status = QpStatus::Infeasible;
      out.x = x_ls;
      out.y = Vector::Zero(p_full);
      out.z = Vector::Zero(qp.G.rows());
      std::ostringstream msg;
      msg << "equality constraints are inconsistent (least-squares misfit " << misfit << ")";
      out.certificate = msg.str();
      out.kkt = kkt_residuals(qp, out.x, out.y, out.z);
      return out;
    }
    if (rank < p_full) {
      Matrix A(rank, n);
      Vector b(rank);
      for (Eigen::Index k = 0; k < rank; ++k) {
        A.row(k) = qp.A.row(kept[k]);
        b(k) = qp.b(kept[k]);
      }
      qp.A = std::move(A);
      qp.b = std::move(b);
    }
  }

  IpmResult ipm = run_ipm(qp, settings);
  out.iterations = ipm.iterations;
  out.x = ipm.x;
  out.z = ipm.z;
  Vector y_reduced = ipm.y;

  if (ipm.status == QpStatus::Optimal && settings.polish && qp.G.rows() > 0)
    out.polished = polish(qp, settings, out.x, y_reduced, out.z);

  out.y = Vector::Zero(p_full);
  if (p_full > 0) {
    if (static_cast<Eigen::Index>(kept.size()) == p_full) {
      out.y = y_reduced;
    } else {
      for (std::size_t k = 0; k < kept.size(); ++k) out.y(kept[k]) = y_reduced(k);
    }
  }
  out.status = ipm.status;
  out.objective = qp.objective(out.x);
  out.kkt = kkt_residuals(qp_in, out.x, out.y, out.z);

  if (out.status == QpStatus::Optimal && qp.G.rows() == 0 &&
      out.kkt.stationarity > 1e3 * settings.tol * (1.0 + inf_norm(qp.q))) {
    // Equality-only problem whose reduced Hessian is singular with the
    // gradient outside its range: the objective decreases without bound.
    out.status = QpStatus::Unbounded;
    out.certificate = "stationarity cannot be met: objective unbounded below on the affine set";
    return out;
  }

  if (out.status != QpStatus::Optimal) {
    // Phase 1: minimize the uniform inequality violation t over Ax = b, Gx - t <= h, t >= -1.
    const Eigen::Index mi = qp.G.rows();
    QpProblem ph;
    ph.P = Matrix::Zero(n + 1, n + 1);
    ph.P.diagonal().head(n).setConstant(1e-10);
    ph.q = Vector::Zero(n + 1);
    ph.q(n) = 1.0;
    ph.A = Matrix::Zero(qp.A.rows(), n + 1);
    ph.A.leftCols(n) = qp.A;
    ph.b = qp.b;
    ph.G = Matrix::Zero(mi + 1, n + 1);
    ph.G.topLeftCorner(mi, n) = qp.G;
    ph.G.col(n).head(mi).setConstant(-1.0);
    ph.G(mi, n) = -1.0;
    ph.h.resize(mi + 1);
    ph.h << qp.h, 1.0;
    QpSettings ps = settings;
    ps.polish = false;
    const IpmResult r1 = run_ipm(ph, ps);
    const double t = r1.x.size() == n + 1 ? r1.x(n) : std::numeric_limits<double>::quiet_NaN();
    std::ostringstream msg;
    if (r1.status == QpStatus::Optimal && t > 1e-7 * (1.0 + inf_norm(qp.h))) {
      out.status = QpStatus::Infeasible;
      msg << "inequalities cannot be met: minimal uniform violation t = " << t;
    } else if (ipm.diverged) {
      out.status = QpStatus::Unbounded;
      msg << "iterates diverged while a feasible point exists (phase-1 t = " << t << ")";
    } else {
      msg << "interior point did not converge in " << settings.max_iters
          << " iterations (phase-1 t = " << t << ")";
    }
    out.certificate = msg.str();
  }
  return out;
}

}  // namespace ddnpc
