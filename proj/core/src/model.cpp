#include "softnash/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace softnash {

Dynamics make_dynamics(MatrixXd A, MatrixXd B, MatrixXd C, double period) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows())
    throw std::invalid_argument("B row count must match state dimension");
  if (C.cols() != A.rows())
    throw std::invalid_argument("C column count must match state dimension");
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("step period must be positive");
  return Dynamics{std::move(A), std::move(B), std::move(C), period};
}

Dynamics discretize_mass_damper(double mass_kg, double damping_Ns_per_m,
                                double period_s) {
  if (!(mass_kg > 0.0)) throw std::invalid_argument("mass must be positive");
  if (!(period_s > 0.0)) throw std::invalid_argument("period must be positive");
  if (!(damping_Ns_per_m >= 0.0))
    throw std::invalid_argument("damping must be non-negative");
  const double ratio = damping_Ns_per_m * period_s / mass_kg;
  if (!(ratio < 1.0)) {
    throw std::invalid_argument("c*T/m = " + std::to_string(ratio) +
                                " >= 1: forward Euler is unstable");
  }

  const auto I = Eigen::Matrix3d::Identity();
  MatrixXd A = MatrixXd::Zero(6, 6);
  A.topLeftCorner(3, 3) = I;
  A.topRightCorner(3, 3) = period_s * I;
  A.bottomRightCorner(3, 3) = (1.0 - ratio) * I;

  MatrixXd B = MatrixXd::Zero(6, 3);
  B.bottomRows(3) = (period_s / mass_kg) * I;

  MatrixXd C = MatrixXd::Zero(3, 6);
  C.leftCols(3) = I;

  return Dynamics{std::move(A), std::move(B), std::move(C), period_s};
}

VectorXd step(const Dynamics& dyn, const VectorXd& x, const VectorXd& force) {
  if (x.size() != dyn.state_dim() || force.size() != dyn.input_dim())
    throw std::invalid_argument("step: dimension mismatch");
  return dyn.A * x + dyn.B * force;
}

VectorXd StylusState::packed() const {
  VectorXd x(6);
  x << position, velocity;
  return x;
}

StylusState StylusState::unpack(const VectorXd& x) {
  if (x.size() != 6) throw std::invalid_argument("stylus state must be 6-D");
  return StylusState{x.head<3>(), x.tail<3>()};
}

WorkspaceBox WorkspaceBox::centered(double halfwidth_m) {
  WorkspaceBox box{Vec3::Constant(-halfwidth_m), Vec3::Constant(halfwidth_m)};
  box.validate();
  return box;
}

bool WorkspaceBox::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

void WorkspaceBox::validate() const {
  if (!(min.array() < max.array()).all())
    throw std::invalid_argument("workspace box needs min < max on every axis");
}

}  // namespace softnash
