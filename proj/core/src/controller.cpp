#include "softnash/controller.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace softnash {

namespace {

void require_symmetric(const MatrixXd& M, const char* name) {
  if (M.rows() != M.cols() ||
      (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12)) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
}

void require_pd(const MatrixXd& M, const char* name) {
  require_symmetric(M, name);
  if (M.size() == 0 || M.llt().info() != Eigen::Success)
    throw std::invalid_argument(std::string(name) + " must be positive definite");
}

void require_psd(const MatrixXd& M, const char* name) {
  require_symmetric(M, name);
  if (M.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(M);
  if (eig.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
}

MatrixXd inverse_pd(const MatrixXd& M, const char* what) {
  Eigen::LDLT<MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(ldlt.vectorD().array() > 0.0).all())
    throw std::invalid_argument(std::string(what) + " must be positive definite");
  return ldlt.solve(MatrixXd::Identity(M.rows(), M.cols()));
}

}  // namespace

void CostWeights::validate() const {
  require_psd(Q_r, "Q_r");
  require_pd(R_r, "R_r");
  require_pd(S, "S");
  require_psd(Q_h, "Q_h");
  require_pd(R_h, "R_h");
  if (S.rows() != R_r.rows() || R_h.rows() != R_r.rows())
    throw std::invalid_argument("R_r, S and R_h must share the input dimension");
  if (Q_h.rows() != Q_r.rows())
    throw std::invalid_argument("Q_r and Q_h must share the output dimension");
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
}

MatrixXd CostWeights::state_weight(const Dynamics& dyn) const {
  if (Q_r.rows() != dyn.output_dim())
    throw std::invalid_argument("Q_r does not match the output dimension");
  MatrixXd Q = dyn.C.transpose() * Q_r * dyn.C;
  if (velocity_weight != 0.0) {
    const auto n = dyn.state_dim();
    const auto p = dyn.output_dim();
    if (!(velocity_weight > 0.0) || n != 2 * p)
      throw std::invalid_argument("velocity weight needs a [p; v] state and must be >= 0");
    Q.bottomRightCorner(p, p) += velocity_weight * MatrixXd::Identity(p, p);
  }
  return Q;
}

Softness::Softness(double tau) : tau_(tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("softness tau must be finite and >= 0");
}

RiccatiSolution solve_robot_value(const Dynamics& dyn, const CostWeights& w,
                                  const RiccatiOptions& options) {
  return solve_dare(dyn.A, dyn.B, w.state_weight(dyn), w.R_r, options);
}

ControllerGains compute_gains(const Dynamics& dyn, const CostWeights& w,
                              const MatrixXd& P_r, Softness tau) {
  const auto m = dyn.input_dim();
  if (w.R_r.rows() != m || w.S.rows() != m || P_r.rows() != dyn.state_dim() ||
      P_r.cols() != dyn.state_dim()) {
    throw std::invalid_argument("compute_gains: inconsistent dimensions");
  }
  ControllerGains g;
  g.H = w.R_r + tau.value() * w.S + dyn.B.transpose() * P_r * dyn.B;
  g.H = 0.5 * (g.H + g.H.transpose()).eval();
  Eigen::LLT<MatrixXd> llt(g.H);
  if (llt.info() != Eigen::Success)
    throw std::logic_error("compute_gains: H(tau) is not positive definite");
  g.K_r = llt.solve(dyn.B.transpose() * P_r * dyn.A);
  g.align = llt.solve((tau.value() * w.alpha) * w.S);
  if (!g.K_r.allFinite() || !g.align.allFinite())
    throw std::logic_error("compute_gains: non-finite gains");
  return g;
}

VectorXd best_response(const ControllerGains& g, const VectorXd& x,
                       const VectorXd& u_h) {
  return -g.K_r * x + g.align * u_h;
}

VectorXd best_response_linear_term(const Dynamics& dyn, const CostWeights& w,
                                   const MatrixXd& P_r, Softness tau,
                                   const VectorXd& x, const VectorXd& u_h) {
  return dyn.B.transpose() * P_r * dyn.A * x -
         (tau.value() * w.alpha) * (w.S * u_h);
}

double lookahead_objective(const Dynamics& dyn, const CostWeights& w,
                           const MatrixXd& P_r, Softness tau, const VectorXd& x,
                           const VectorXd& u_h, const VectorXd& u_r) {
  const double t = tau.value();
  const VectorXd next = dyn.A * x + dyn.B * u_r;
  return u_r.dot((w.R_r + t * w.S) * u_r) -
         2.0 * t * w.alpha * u_r.dot(w.S * u_h) + next.dot(P_r * next);
}

VectorXd stage_best_response(const CostWeights& w, const MatrixXd& prior_cov,
                             double beta, double alpha, const VectorXd& u_h) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const MatrixXd prior_precision = inverse_pd(prior_cov, "prior covariance");
  // beta * KL(dirac || N(alpha u_h, Sigma0)) = (beta/2) |u - alpha u_h|^2_{Sigma0^-1}
  const MatrixXd attraction = 0.5 * beta * prior_precision;
  const MatrixXd G = w.R_r + attraction;
  return G.llt().solve(alpha * (attraction * u_h));
}

GaussianPolicy maxent_stage_policy(const CostWeights& w,
                                   const MatrixXd& prior_cov, double beta,
                                   double lambda, double alpha,
                                   const VectorXd& u_h) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  GaussianPolicy policy;
  policy.mean = stage_best_response(w, prior_cov, beta, alpha, u_h);
  const MatrixXd prior_precision = inverse_pd(prior_cov, "prior covariance");
  const MatrixXd G = w.R_r + beta * prior_precision;
  MatrixXd cov = lambda * G.ldlt().solve(MatrixXd::Identity(G.rows(), G.cols()));
  policy.covariance = 0.5 * (cov + cov.transpose());
  policy.prior_covariance = prior_cov;
  policy.beta = beta;
  policy.lambda = lambda;
  return policy;
}

Vec3 classic_vf(double kp, double kd, const StylusState& x,
                const ReferenceSample& ref) {
  if (!(kp >= 0.0) || !(kd >= 0.0))
    throw std::invalid_argument("classic_vf: gains must be >= 0");
  return -kp * (x.position - ref.position) - kd * (x.velocity - ref.velocity);
}

StageCosts stage_costs(const CostWeights& w, Softness tau, double alpha,
                       const VectorXd& e, const VectorXd& u_r,
                       const VectorXd& u_h) {
  const VectorXd pull = u_r - alpha * u_h;
  StageCosts c;
  c.robot = e.dot(w.Q_r * e) + u_r.dot(w.R_r * u_r) +
            tau.value() * pull.dot(w.S * pull);
  c.human = e.dot(w.Q_h * e) + u_h.dot(w.R_h * u_h);
  return c;
}

std::string Mode::name() const {
  switch (kind) {
    case ModeKind::kClassic:
      return "CLASSIC";
    case ModeKind::kNone:
      return "NONE";
    case ModeKind::kNash: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), tau);
      return "NASH_" + std::string(buf, end);
    }
  }
  return "NONE";
}

Mode parse_mode(std::string_view name, double tau_if_bare) {
  if (name == "CLASSIC") return Mode::classic();
  if (name == "NONE") return Mode::none();
  if (name == "NASH") return Mode::nash(Softness(tau_if_bare).value());
  constexpr std::string_view prefix = "NASH_";
  if (name.starts_with(prefix)) {
    const auto digits = name.substr(prefix.size());
    double tau = 0.0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), tau);
    if (ec == std::errc() && ptr == digits.data() + digits.size() &&
        !digits.empty()) {
      return Mode::nash(Softness(tau).value());
    }
  }
  throw std::invalid_argument("unknown assistance mode '" + std::string(name) +
                              "'");
}

std::vector<Mode> standard_modes() {
  return {Mode::classic(), Mode::nash(0), Mode::nash(1), Mode::nash(2),
          Mode::nash(3),   Mode::nash(5), Mode::nash(8), Mode::none()};
}

}  // namespace softnash
