#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "softnash/model.hpp"
#include "softnash/riccati.hpp"

namespace softnash {

// Weights of the robot stage cost
//   l_r = e'Q_r e + u_r'R_r u_r + tau (u_r - alpha u_h)' S (u_r - alpha u_h)
// and of the human evaluation cost l_h = e'Q_h e + u_h'R_h u_h.
struct CostWeights {
  MatrixXd Q_r;
  MatrixXd R_r;
  MatrixXd S;
  double alpha = 1.0;
  MatrixXd Q_h;
  MatrixXd R_h;
  // Optional isotropic weight on the velocity block of the state; zero keeps
  // the Riccati weight at C'Q_rC.
  double velocity_weight = 0.0;

  // Symmetry within 1e-12, Cholesky on R_r, R_h and S; throws
  // std::invalid_argument.
  void validate() const;

  // Q = C' Q_r C (+ velocity_weight on the velocity block), the state weight
  // handed to the Riccati solver.
  MatrixXd state_weight(const Dynamics& dyn) const;
};

class Softness {
 public:
  Softness() = default;
  explicit Softness(double tau);

  double value() const { return tau_; }

 private:
  double tau_ = 0.0;
};

struct ControllerGains {
  MatrixXd H;      // R_r + tau S + B'P_r B
  MatrixXd K_r;    // H^-1 B'P_r A
  MatrixXd align;  // H^-1 (tau alpha S)
};

// Solves the DARE for (A, B, C'Q_rC, R_r). tau-independent.
RiccatiSolution solve_robot_value(const Dynamics& dyn, const CostWeights& w,
                                  const RiccatiOptions& options = {});

ControllerGains compute_gains(const Dynamics& dyn, const CostWeights& w,
                              const MatrixXd& P_r, Softness tau);
inline ControllerGains compute_gains(const Dynamics& dyn, const CostWeights& w,
                                     const RiccatiSolution& value,
                                     Softness tau) {
  return compute_gains(dyn, w, value.P, tau);
}

/// Soft-Nash robot best response u* = -K_r x + Align u_h.
VectorXd best_response(const ControllerGains& g, const VectorXd& x,
                       const VectorXd& u_h);

// Linear term b = B'P_r A x - tau alpha S u_h of the one-step problem.
VectorXd best_response_linear_term(const Dynamics& dyn, const CostWeights& w,
                                   const MatrixXd& P_r, Softness tau,
                                   const VectorXd& x, const VectorXd& u_h);

// One-step lookahead objective minimized by best_response (up to terms
// independent of u_r):
//   u_r'(R_r + tau S)u_r - 2 tau alpha u_r'S u_h + (Ax + Bu_r)'P_r(Ax + Bu_r)
double lookahead_objective(const Dynamics& dyn, const CostWeights& w,
                           const MatrixXd& P_r, Softness tau, const VectorXd& x,
                           const VectorXd& u_h, const VectorXd& u_r);

// Minimizer of the KL trust-region stage problem without value lookahead,
//   u'R_r u + (beta/2)(u - alpha u_h)' Sigma0^-1 (u - alpha u_h),
// i.e. (R_r + beta/2 Sigma0^-1)^-1 (beta/2) Sigma0^-1 alpha u_h. Coincides with
// best_response for P_r = 0, S = Sigma0^-1 / 2, tau = beta.
VectorXd stage_best_response(const CostWeights& w, const MatrixXd& prior_cov,
                             double beta, double alpha, const VectorXd& u_h);

struct GaussianPolicy {
  VectorXd mean;
  MatrixXd covariance;
  MatrixXd prior_covariance;
  double beta = 0.0;
  double lambda = 0.0;
};

// Maximum-entropy stage optimum: mean as stage_best_response (independent of
// lambda), covariance lambda (R_r + beta Sigma0^-1)^-1.
GaussianPolicy maxent_stage_policy(const CostWeights& w,
                                   const MatrixXd& prior_cov, double beta,
                                   double lambda, double alpha,
                                   const VectorXd& u_h);

// PD virtual fixture: -K_p (p - q) - K_d (v - qdot).
Vec3 classic_vf(double kp, double kd, const StylusState& x,
                const ReferenceSample& ref);

struct StageCosts {
  double robot = 0.0;
  double human = 0.0;
};

StageCosts stage_costs(const CostWeights& w, Softness tau, double alpha,
                       const VectorXd& e, const VectorXd& u_r,
                       const VectorXd& u_h);

enum class ModeKind { kClassic, kNash, kNone };

// Assistance mode. NASH modes carry their softness; the canonical names are
// CLASSIC, NASH_<tau>, NONE.
struct Mode {
  ModeKind kind = ModeKind::kNone;
  double tau = 0.0;

  std::string name() const;
  bool operator==(const Mode&) const = default;

  static Mode classic() { return {ModeKind::kClassic, 0.0}; }
  static Mode nash(double tau) { return {ModeKind::kNash, tau}; }
  static Mode none() { return {ModeKind::kNone, 0.0}; }
};

// Accepts CLASSIC, NONE, NASH_<tau> and bare NASH (tau from `tau_if_bare`).
// Throws std::invalid_argument for anything else.
Mode parse_mode(std::string_view name, double tau_if_bare = 0.0);

// CLASSIC, NASH_0, NASH_1, NASH_2, NASH_3, NASH_5, NASH_8, NONE.
std::vector<Mode> standard_modes();

}  // namespace softnash
