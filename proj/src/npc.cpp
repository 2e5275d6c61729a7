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
#include "ddnpc/npc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddnpc {

NpcConfig NpcConfig::defaults(int m, int L, Box input_box) {
  NpcConfig c;
  c.L = L;
  c.Q = Matrix::Identity(m, m);
  c.R = Matrix::Identity(m, m);
  c.u_setpoint = Vector::Zero(m);
  c.y_setpoint = Vector::Zero(m);
  c.input_box = std::move(input_box);
  return c;
}

void NpcConfig::validate(int m, int d_max) const {
  require(L >= d_max, "npc config: horizon L = " + std::to_string(L) + " must be >= d_max = " +
                          std::to_string(d_max));
  require(lambda_alpha > 0.0 && lambda_sigma > 0.0, "npc config: lambda_alpha and lambda_sigma must be > 0");
  require(Q.rows() == m && Q.cols() == m && R.rows() == m && R.cols() == m,
          "npc config: Q and R must be m x m");
  require(Q.isApprox(Q.transpose()) && R.isApprox(R.transpose()), "npc config: Q and R must be symmetric");
  require(Q.llt().info() == Eigen::Success && R.llt().info() == Eigen::Success,
          "npc config: Q and R must be positive definite");
  require(u_setpoint.size() == m && y_setpoint.size() == m, "npc config: setpoints must have m entries");
  require(input_box.dim() == m, "npc config: input box must have m entries");
  require((input_box.lower.array() < u_setpoint.array()).all() &&
              (u_setpoint.array() < input_box.upper.array()).all(),
          "npc config: input setpoint must lie in the interior of the input box");
  require(sqp_max_iters >= 1 && sqp_tol > 0.0 && qp_tol > 0.0, "npc config: bad solver settings");
}

int PredictionData::n() const {
  int s = 0;
  for (int di : d) s += di;
  return s;
}

int PredictionData::d_max() const { return *std::max_element(d.begin(), d.end()); }

std::shared_ptr<const PredictionData> PredictionData::from_data(const Trajectory& data,
                                                                const Dictionary& dict,
                                                                const DictionaryConstants& constants,
                                                                double w_star, int L) {
  data.validate();
  auto out = std::make_shared<PredictionData>(PredictionData{dict, {}, {}, constants, w_star, data.d, L, {}});
  const int N = data.length();
  const int dmax = data.d_max();
  const int n = data.n();
  if (N < L + dmax)
    throw ArgumentError("prediction data: N = " + std::to_string(N) + " is shorter than L + d_max");
  const Matrix psi = dict.evaluate_sequence(data, 0, N);
  out->pe = data_excitation(psi, lift_sequence(data, 0, N), std::min(L + dmax + n, N));
  if (!out->pe.satisfied || L + dmax + n > N)
    throw PreconditionError("prediction data: excited Psi data is not persistently exciting of order L + d_max + n = " +
                            std::to_string(L + dmax + n) + " (rank " + std::to_string(out->pe.rank) + " of " +
                            std::to_string(out->pe.rows) + ")");
  out->hankel_psi = build_hankel(psi, L + dmax);
  out->hankel_xi = build_hankel(lift_sequence(data, 0, N + 1), L + dmax + 1);
  return out;
}

double stage_cost(const NpcConfig& config, const Vector& u, const Vector& y) {
  require(u.size() == config.R.rows() && y.size() == config.Q.rows(), "stage_cost: dimension mismatch");
  const Vector du = u - config.u_setpoint;
  const Vector dy = y - config.y_setpoint;
  return du.dot(config.R * du) + dy.dot(config.Q * dy);
}

double slack_bound_rhs(const DictionaryConstants& c, double w_star, double alpha_l1) {
  require(alpha_l1 >= 0.0, "slack_bound_rhs: ||alpha||_1 must be >= 0");
  return c.k_psi * w_star + (c.eps_star + c.k_w * w_star) * c.g_dagger_inf_norm * (1.0 + alpha_l1);
}

const char* to_string(NpcStatus s) {
  switch (s) {
    case NpcStatus::Optimal: return "optimal";
    case NpcStatus::Infeasible: return "infeasible";
    case NpcStatus::MaxIterations: return "max-iters";
    case NpcStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double NpcSolution::sigma_inf() const {
  double s = 0.0;
  if (sigma_psi.size() > 0) s = std::max(s, sigma_psi.lpNorm<Eigen::Infinity>());
  if (sigma_xi.size() > 0) s = std::max(s, sigma_xi.lpNorm<Eigen::Infinity>());
  return s;
}

Vector NpcSolution::sigma_block_norms(int r, int n) const {
  const int blocks = static_cast<int>(sigma_xi.size()) / n;
  Vector out = Vector::Zero(blocks);
  for (int b = 0; b < blocks; ++b) {
    double v = sigma_xi.segment(b * n, n).lpNorm<Eigen::Infinity>();
    if ((b + 1) * r <= sigma_psi.size()) v = std::max(v, sigma_psi.segment(b * r, r).lpNorm<Eigen::Infinity>());
    out(b) = v;
  }
  return out;
}

NpcProblem::NpcProblem(NpcProblemData data, NpcConfig config)
    : data_(std::move(data)), config_(std::move(config)) {
  if (!data_.prediction) throw AssemblyError("npc: missing prediction data");
  const PredictionData& pd = *data_.prediction;
  const int m = pd.m();
  const int dmax = pd.d_max();
  config_.validate(m, dmax);
  if (config_.L != pd.L)
    throw AssemblyError("npc: config horizon L = " + std::to_string(config_.L) +
                        " differs from the Hankel horizon " + std::to_string(pd.L));

  layout_.L = config_.L;
  layout_.m = m;
  layout_.n = pd.n();
  layout_.r = pd.dict.r();
  layout_.d_max = dmax;
  layout_.n_alpha = static_cast<int>(pd.hankel_psi.cols());
  layout_.n_sigma_psi = layout_.r * (config_.L + dmax);
  layout_.n_sigma_xi = layout_.n * (config_.L + dmax + 1);

  if (pd.hankel_psi.rows() != layout_.n_sigma_psi || pd.hankel_xi.rows() != layout_.n_sigma_xi ||
      pd.hankel_xi.cols() != pd.hankel_psi.cols())
    throw AssemblyError("npc: Hankel matrices have inconsistent shapes");
  if (data_.past.u.rows() != dmax || data_.past.u.cols() != m || data_.past.y.rows() != dmax ||
      data_.past.y.cols() != m)
    throw AssemblyError("npc: past window must hold d_max rows of m inputs and m outputs");
  if (!data_.past.u.allFinite() || !data_.past.y.allFinite())
    throw AssemblyError("npc: past window contains non-finite entries");

  for (int k = 0; k < dmax; ++k) {
    if (!config_.input_box.contains(data_.past.u.row(k).transpose(), 1e-12)) {
      infeasible_ = "past input u_{t-" + std::to_string(dmax - k) + "} lies outside the input box";
      break;
    }
  }

  const DictionaryConstants& c = pd.constants;
  c0_ = c.k_psi * pd.w_star;
  c1_ = (c.eps_star + c.k_w * pd.w_star) * c.g_dagger_inf_norm;
  alpha_weight_ = config_.lambda_alpha * std::max(c.eps_star, pd.w_star);

  const int nx = layout_.total();
  cost_hessian_ = Matrix::Zero(nx, nx);
  cost_gradient_ = Vector::Zero(nx);
  const Vector Rus = config_.R * config_.u_setpoint;
  const Vector Qys = config_.Q * config_.y_setpoint;
  for (int k = 0; k < layout_.L; ++k) {
    const int ui = layout_.u(k, 0);
    const int yi = layout_.y(0, k);
    cost_hessian_.block(ui, ui, m, m) = 2.0 * config_.R;
    cost_hessian_.block(yi, yi, m, m) = 2.0 * config_.Q;
    cost_gradient_.segment(ui, m) = -2.0 * Rus;
    cost_gradient_.segment(yi, m) = -2.0 * Qys;
  }
  for (int j = 0; j < layout_.n_alpha; ++j) cost_hessian_(layout_.alpha(j), layout_.alpha(j)) = 2.0 * alpha_weight_;
  for (int j = 0; j < layout_.n_sigma(); ++j)
    cost_hessian_(layout_.sigma(j), layout_.sigma(j)) = 2.0 * config_.lambda_sigma;
  cost_constant_ = layout_.L * (config_.u_setpoint.dot(Rus) + config_.y_setpoint.dot(Qys));
}

Slot NpcProblem::input_slot(int k, int j) const {
  const int dmax = layout_.d_max;
  if (k < -dmax || k >= layout_.L || j < 0 || j >= layout_.m)
    throw IndexError("npc: input slot (" + std::to_string(k) + ", " + std::to_string(j) + ") out of range");
  if (k < 0) return {-1, data_.past.u(k + dmax, j)};
  return {layout_.u(k, j), 0.0};
}

Slot NpcProblem::output_slot(int i, int k) const {
  const int dmax = layout_.d_max;
  if (i < 0 || i >= layout_.m) throw IndexError("npc: output channel out of range");
  const int di = data_.prediction->d[i];
  if (k < -dmax || k >= layout_.L + di)
    throw IndexError("npc: output slot (" + std::to_string(i) + ", " + std::to_string(k) + ") out of range");
  if (k < 0) return {-1, data_.past.y(k + dmax, i)};
  if (k >= layout_.L) return {-1, config_.y_setpoint(i)};
  return {layout_.y(i, k), 0.0};
}

double NpcProblem::cost(const Vector& x) const {
  require(x.size() == layout_.total(), "npc: decision vector has wrong size");
  return 0.5 * x.dot(cost_hessian_ * x) + cost_gradient_.dot(x) + cost_constant_;
}

namespace {

double slot_value(const Slot& s, const Vector& x) { return s.fixed() ? s.value : x(s.var); }

// Everything the SQP needs about one predicted sample block (u_k, Xi_k).
struct BlockSlots {
  std::vector<Slot> u;
  std::vector<Slot> xi;
};

std::vector<BlockSlots> block_slots(const NpcProblem& p) {
  const auto& lay = p.layout();
  const auto& d = p.prediction().d;
  std::vector<BlockSlots> blocks(lay.L + lay.d_max + 1);
  for (int b = 0; b <= lay.L + lay.d_max; ++b) {
    const int k = b - lay.d_max;
    if (k < lay.L)
      for (int j = 0; j < lay.m; ++j) blocks[b].u.push_back(p.input_slot(k, j));
    for (int i = 0; i < lay.m; ++i)
      for (int q = 0; q < d[i]; ++q) blocks[b].xi.push_back(p.output_slot(i, k + q));
  }
  return blocks;
}

Vector gather(const std::vector<Slot>& slots, const Vector& x) {
  Vector v(static_cast<Eigen::Index>(slots.size()));
  for (std::size_t q = 0; q < slots.size(); ++q) v(q) = slot_value(slots[q], x);
  return v;
}

}  // namespace

Vector NpcProblem::predicted_stack(const Vector& x) const {
  const auto blocks = block_slots(*this);
  const auto& lay = layout_;
  Vector out(lay.n_sigma());
  for (int b = 0; b < lay.L + lay.d_max; ++b)
    out.segment(b * lay.r, lay.r) = prediction().dict.evaluate(gather(blocks[b].u, x), gather(blocks[b].xi, x));
  for (int b = 0; b <= lay.L + lay.d_max; ++b)
    out.segment(lay.n_sigma_psi + b * lay.n, lay.n) = gather(blocks[b].xi, x);
  return out;
}

Vector NpcProblem::hankel_residual(const Vector& x) const {
  const auto& lay = layout_;
  const Vector alpha = x.segment(lay.alpha(0), lay.n_alpha);
  Vector res = predicted_stack(x) + x.segment(lay.sigma(0), lay.n_sigma());
  res.head(lay.n_sigma_psi) -= prediction().hankel_psi * alpha;
  res.tail(lay.n_sigma_xi) -= prediction().hankel_xi * alpha;
  return res;
}

NpcProblem assemble(const NpcProblemData& data, const NpcConfig& config) {
  try {
    return NpcProblem(data, config);
  } catch (const ContractError& e) {
    throw AssemblyError(std::string("npc assembly: ") + e.what());
  }
}

namespace {

// Working state of the SQP in the reduced variables z = (u_bar, y_bar, alpha);
// sigma is eliminated through sigma = H alpha - S(z).
class SqpSolver {
 public:
  explicit SqpSolver(const NpcProblem& p) : p_(p), lay_(p.layout()), blocks_(block_slots(p)) {
    nz_ = 2 * lay_.L * lay_.m + lay_.n_alpha;
    H_.resize(lay_.n_sigma(), lay_.n_alpha);
    H_ << p.prediction().hankel_psi, p.prediction().hankel_xi;
    build_fixed_parts();
  }

  NpcSolution run(const NpcSolution* init);

 private:
  [[nodiscard]] Vector full(const Vector& z) const {
    Vector x = Vector::Zero(lay_.total());
    x.head(nz_) = z;
    x.segment(lay_.sigma(0), lay_.n_sigma()) = sigma(z);
    return x;
  }
  [[nodiscard]] Vector stack(const Vector& z) const { return p_.predicted_stack(full_no_sigma(z)); }
  [[nodiscard]] Vector full_no_sigma(const Vector& z) const {
    Vector x = Vector::Zero(lay_.total());
    x.head(nz_) = z;
    return x;
  }
  [[nodiscard]] Vector alpha(const Vector& z) const { return z.segment(lay_.alpha(0), lay_.n_alpha); }
  [[nodiscard]] Vector sigma(const Vector& z) const { return H_ * alpha(z) - stack(z); }

  [[nodiscard]] double violation(const Vector& z) const {
    const Vector s = sigma(z);
    if (p_.slack_pinned()) return s.lpNorm<1>();
    const double bound = p_.slack_c0() + p_.slack_c1() * (1.0 + alpha(z).lpNorm<1>());
    return (s.cwiseAbs().array() - bound).max(0.0).sum();
  }
  [[nodiscard]] double merit(const Vector& z, double nu) const { return p_.cost(full(z)) + nu * violation(z); }

  void build_fixed_parts();
  void linearize(const Vector& z, Matrix& M, Vector& m0) const;
  [[nodiscard]] Vector initial_point(const NpcSolution* init) const;
  [[nodiscard]] NpcSolution finish(const Vector& z, NpcStatus status) const;

  const NpcProblem& p_;
  const VariableLayout& lay_;
  std::vector<BlockSlots> blocks_;
  int nz_ = 0;
  Matrix H_;
  Matrix Pz_;
  Vector qz_;
  Matrix G_box_;
  Vector h_box_;
};

void SqpSolver::build_fixed_parts() {
  Pz_ = p_.cost_hessian().topLeftCorner(nz_, nz_);
  qz_ = p_.cost_gradient().head(nz_);
  const int nu = lay_.L * lay_.m;
  const Box& box = p_.config().input_box;
  G_box_ = Matrix::Zero(2 * nu, nz_);
  h_box_.resize(2 * nu);
  for (int k = 0; k < lay_.L; ++k) {
    for (int j = 0; j < lay_.m; ++j) {
      const int v = lay_.u(k, j);
      G_box_(v, v) = 1.0;
      h_box_(v) = box.upper(j);
      G_box_(nu + v, v) = -1.0;
      h_box_(nu + v) = -box.lower(j);
    }
  }
}

// sigma(z) ~= M z + m0 around z.
void SqpSolver::linearize(const Vector& z, Matrix& M, Vector& m0) const {
  const int r = lay_.r;
  const int n = lay_.n;
  const Vector x = full_no_sigma(z);
  Matrix JS = Matrix::Zero(lay_.n_sigma(), nz_);
  Vector S0(lay_.n_sigma());
  const Dictionary& dict = p_.prediction().dict;
  for (int b = 0; b < lay_.L + lay_.d_max; ++b) {
    const auto& blk = blocks_[b];
    const Vector u = gather(blk.u, x);
    const Vector xi = gather(blk.xi, x);
    S0.segment(b * r, r) = dict.evaluate(u, xi);
    bool any_var = false;
    for (const auto& s : blk.u) any_var |= !s.fixed();
    for (const auto& s : blk.xi) any_var |= !s.fixed();
    if (!any_var) continue;
    const Matrix J = dict.jacobian(u, xi);
    for (int j = 0; j < lay_.m; ++j)
      if (!blk.u[j].fixed()) JS.block(b * r, blk.u[j].var, r, 1) += J.col(j);
    for (int q = 0; q < n; ++q)
      if (!blk.xi[q].fixed()) JS.block(b * r, blk.xi[q].var, r, 1) += J.col(lay_.m + q);
  }
  for (int b = 0; b <= lay_.L + lay_.d_max; ++b) {
    const auto& blk = blocks_[b];
    const int row0 = lay_.n_sigma_psi + b * n;
    for (int q = 0; q < n; ++q) {
      S0(row0 + q) = slot_value(blk.xi[q], x);
      if (!blk.xi[q].fixed()) JS(row0 + q, blk.xi[q].var) = 1.0;
    }
  }
  M = -JS;
  M.rightCols(lay_.n_alpha) += H_;
  m0 = -S0 + JS * z;
}

Vector SqpSolver::initial_point(const NpcSolution* init) const {
  Vector z = Vector::Zero(nz_);
  const NpcConfig& cfg = p_.config();
  for (int k = 0; k < lay_.L; ++k) {
    for (int j = 0; j < lay_.m; ++j) {
      double u = cfg.u_setpoint(j);
      double y = cfg.y_setpoint(j);
      if (init && init->u_bar.rows() == lay_.L + lay_.d_max && init->u_bar.cols() == lay_.m) u = init->input(k)(j);
      if (init && static_cast<int>(init->y_bar.size()) == lay_.m && init->y_bar[j].size() > k + lay_.d_max)
        y = init->output(j, k);
      z(lay_.u(k, j)) = std::clamp(u, cfg.input_box.lower(j), cfg.input_box.upper(j));
      z(lay_.y(j, k)) = y;
    }
  }
  if (init && init->alpha.size() == lay_.n_alpha) {
    z.segment(lay_.alpha(0), lay_.n_alpha) = init->alpha;
  } else {
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(H_);
    z.segment(lay_.alpha(0), lay_.n_alpha) = cod.solve(stack(z));
  }
  return z;
}

NpcSolution SqpSolver::finish(const Vector& z, NpcStatus status) const {
  NpcSolution sol;
  sol.status = status;
  sol.d_max = lay_.d_max;
  sol.x = full(z);
  const auto& d = p_.prediction().d;
  sol.u_bar.resize(lay_.L + lay_.d_max, lay_.m);
  for (int k = -lay_.d_max; k < lay_.L; ++k)
    for (int j = 0; j < lay_.m; ++j) sol.u_bar(k + lay_.d_max, j) = slot_value(p_.input_slot(k, j), sol.x);
  sol.y_bar.resize(lay_.m);
  for (int i = 0; i < lay_.m; ++i) {
    sol.y_bar[i].resize(lay_.L + lay_.d_max + d[i]);
    for (int k = -lay_.d_max; k < lay_.L + d[i]; ++k) sol.y_bar[i](k + lay_.d_max) = slot_value(p_.output_slot(i, k), sol.x);
  }
  sol.alpha = alpha(z);
  const Vector s = sol.x.segment(lay_.sigma(0), lay_.n_sigma());
  sol.sigma_psi = s.head(lay_.n_sigma_psi);
  sol.sigma_xi = s.tail(lay_.n_sigma_xi);
  sol.cost = p_.cost(sol.x);
  return sol;
}

NpcSolution SqpSolver::run(const NpcSolution* init) {
  if (p_.assembly_infeasibility()) {
    NpcSolution sol = finish(initial_point(nullptr), NpcStatus::Infeasible);
    sol.certificate = *p_.assembly_infeasibility();
    return sol;
  }
  const NpcConfig& cfg = p_.config();
  const int ns = lay_.n_sigma();
  const bool pinned = p_.slack_pinned();
  const double c0 = p_.slack_c0();
  const double c1 = p_.slack_c1();
  const double lam = cfg.lambda_sigma;

  QpSettings qs;
  qs.tol = cfg.qp_tol;
  Vector z = initial_point(init);
  double nu = 0.0;
  double last_kkt = 0.0;
  std::vector<std::pair<double, double>> merits;
  NpcStatus status = NpcStatus::MaxIterations;
  int iters = 0;

  for (int it = 0; it < cfg.sqp_max_iters; ++it) {
    iters = it + 1;
    Matrix M;
    Vector m0;
    linearize(z, M, m0);

    QpProblem qp;
    qp.P = Pz_ + 2.0 * lam * M.transpose() * M;
    qp.q = qz_ + 2.0 * lam * M.transpose() * m0;
    if (pinned) {
      qp.A = M;
      qp.b = -m0;
      qp.G = G_box_;
      qp.h = h_box_;
    } else {
      Vector sgn = Vector::Zero(nz_);
      const Vector a = alpha(z);
      for (int j = 0; j < lay_.n_alpha; ++j)
        sgn(lay_.alpha(j)) = a(j) > 0.0 ? 1.0 : (a(j) < 0.0 ? -1.0 : 0.0);
      const Eigen::RowVectorXd c1s = c1 * sgn.transpose();
      qp.G.resize(G_box_.rows() + 2 * ns, nz_);
      qp.h.resize(G_box_.rows() + 2 * ns);
      qp.G.topRows(G_box_.rows()) = G_box_;
      qp.h.head(G_box_.rows()) = h_box_;
      qp.G.middleRows(G_box_.rows(), ns) = M.rowwise() - c1s;
      qp.G.bottomRows(ns) = (-M).rowwise() - c1s;
      qp.h.segment(G_box_.rows(), ns) = Vector::Constant(ns, c0 + c1) - m0;
      qp.h.tail(ns) = Vector::Constant(ns, c0 + c1) + m0;
    }
    const QpSolution qs_sol = solve_qp(qp, qs);
    last_kkt = qs_sol.kkt.max();
    if (qs_sol.status == QpStatus::Infeasible) {
      NpcSolution sol = finish(z, NpcStatus::Infeasible);
      sol.sqp_iters = iters;
      sol.kkt_residual = last_kkt;
      sol.merit_steps = std::move(merits);
      sol.certificate = "QP subproblem infeasible: " + qs_sol.certificate;
      return sol;
    }
    if (qs_sol.status != QpStatus::Optimal) {
      NpcSolution sol = finish(z, NpcStatus::NumericalFailure);
      sol.sqp_iters = iters;
      sol.kkt_residual = last_kkt;
      sol.merit_steps = std::move(merits);
      sol.certificate = std::string("QP subproblem ") + to_string(qs_sol.status) + ": " + qs_sol.certificate;
      return sol;
    }

    // Penalty weight must dominate the multipliers of the sigma rows.
    double mult = 0.0;
    if (pinned) {
      if (qs_sol.y.size() > 0) mult = qs_sol.y.lpNorm<Eigen::Infinity>();
    } else {
      mult = qs_sol.z.tail(2 * ns).lpNorm<Eigen::Infinity>();
    }
    nu = std::max({nu, 1.5 * mult, 1.0});

    const Vector step = qs_sol.x - z;
    const double step_norm = step.lpNorm<Eigen::Infinity>();
    if (step_norm < cfg.sqp_tol) {
      z = qs_sol.x;
      status = NpcStatus::Optimal;
      break;
    }

    const double phi0 = merit(z, nu);
    const double model = qp.objective(qs_sol.x) + p_.cost_constant() + lam * m0.squaredNorm();
    const double pred = std::max(phi0 - model, 0.0);
    double a = 1.0;
    double phi = merit(z + step, nu);
    while (phi > phi0 - 1e-4 * a * pred && a > 1e-10) {
      a *= 0.5;
      phi = merit(z + a * step, nu);
    }
    if (phi > phi0) {
      // No decrease along the QP direction; the current iterate is as good as it gets.
      status = NpcStatus::MaxIterations;
      break;
    }
    merits.emplace_back(phi0, phi);
    z += a * step;

    // Exactly linear constraints with an unchanged sign pattern: the next QP would repeat this one.
    if (a == 1.0) {
      Matrix M2;
      Vector m02;
      bool same_signs = true;
      if (!pinned) {
        const Vector a_old = alpha(z - step);
        const Vector a_new = alpha(z);
        for (int j = 0; j < lay_.n_alpha && same_signs; ++j)
          same_signs = (a_old(j) > 0.0) == (a_new(j) > 0.0) && (a_old(j) < 0.0) == (a_new(j) < 0.0);
      }
      const Vector lin = M * z + m0;
      const Vector exact = sigma(z);
      if (same_signs && (lin - exact).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + exact.lpNorm<Eigen::Infinity>())) {
        status = NpcStatus::Optimal;
        break;
      }
    }
  }

  NpcSolution sol = finish(z, status);
  sol.sqp_iters = iters;
  sol.kkt_residual = last_kkt;
  sol.merit_steps = std::move(merits);
  return sol;
}

}  // namespace

NpcSolution solve(const NpcProblem& problem, const NpcSolution* init) {
  SqpSolver sqp(problem);
  return sqp.run(init);
}

NpcSolution shift_solution(const NpcSolution& previous, const NpcProblem& next) {
  const auto& lay = next.layout();
  const NpcConfig& cfg = next.config();
  const auto& d = next.prediction().d;
  NpcSolution s;
  s.d_max = lay.d_max;
  s.u_bar.resize(lay.L + lay.d_max, lay.m);
  s.y_bar.resize(lay.m);
  for (int i = 0; i < lay.m; ++i) s.y_bar[i].resize(lay.L + lay.d_max + d[i]);
  const int shift = lay.d_max;
  for (int k = -lay.d_max; k < lay.L; ++k) {
    const int src = k + shift;
    for (int j = 0; j < lay.m; ++j)
      s.u_bar(k + lay.d_max, j) = src < lay.L && src + previous.d_max < previous.u_bar.rows()
                                      ? previous.u_bar(src + previous.d_max, j)
                                      : cfg.u_setpoint(j);
  }
  for (int i = 0; i < lay.m; ++i)
    for (int k = -lay.d_max; k < lay.L + d[i]; ++k) {
      const int src = k + shift;
      s.y_bar[i](k + lay.d_max) =
          src < lay.L && src + previous.d_max < previous.y_bar[i].size() ? previous.y_bar[i](src + previous.d_max)
                                                                           : cfg.y_setpoint(i);
    }
  return s;
}

}  // namespace ddnpc
