#include "softnash/assist.hpp"

#include <stdexcept>

namespace softnash {

AssistPolicy::AssistPolicy(Mode mode, const Dynamics& dyn,
                           const CostWeights& weights, const MatrixXd& P_r,
                           ClassicGains classic)
    : mode_(mode),
      feedback_(MatrixXd::Zero(dyn.input_dim(), dyn.state_dim())),
      alignment_(MatrixXd::Zero(dyn.input_dim(), dyn.input_dim())) {
  if (dyn.state_dim() != 6 || dyn.input_dim() != 3)
    throw std::invalid_argument("AssistPolicy expects the 3-axis stylus plant");
  switch (mode.kind) {
    case ModeKind::kNone:
      break;
    case ModeKind::kClassic:
      if (!(classic.kp >= 0.0) || !(classic.kd >= 0.0))
        throw std::invalid_argument("classic gains must be >= 0");
      feedback_.leftCols(3) = classic.kp * Eigen::Matrix3d::Identity();
      feedback_.rightCols(3) = classic.kd * Eigen::Matrix3d::Identity();
      break;
    case ModeKind::kNash: {
      auto gains = compute_gains(dyn, weights, P_r, Softness(mode.tau));
      feedback_ = std::move(gains.K_r);
      alignment_ = std::move(gains.align);
      break;
    }
  }
}

VectorXd error_state(const StylusState& x, const ReferenceSample& ref) {
  VectorXd xi(6);
  xi << x.position - ref.position, x.velocity - ref.velocity;
  return xi;
}

Vec3 AssistPolicy::force(const StylusState& x, const ReferenceSample& ref,
                         const Vec3& u_h) const {
  switch (mode_.kind) {
    case ModeKind::kNone:
      return Vec3::Zero();
    case ModeKind::kClassic:
      return classic_vf(feedback_(0, 0), feedback_(0, 3), x, ref);
    case ModeKind::kNash:
      return -feedback_ * error_state(x, ref) + alignment_ * u_h;
  }
  return Vec3::Zero();
}

double closed_loop_report(const Dynamics& dyn, const MatrixXd& K_r,
                          const MatrixXd& align, const MatrixXd& K_h) {
  const auto m = dyn.input_dim();
  const MatrixXd I = MatrixXd::Identity(m, m);
  return spectral_radius(dyn.A - dyn.B * K_r + dyn.B * (align + I) * K_h);
}

Vec3 clip_radial(const Vec3& u, double cap) {
  const double norm = u.norm();
  if (norm > cap) return u * (cap / norm);
  return u;
}

}  // namespace softnash
