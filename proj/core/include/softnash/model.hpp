#pragma once

#include <Eigen/Dense>

namespace softnash {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

// Discrete-time linear plant x+ = A x + B F with output y = C x.
struct Dynamics {
  MatrixXd A;
  MatrixXd B;
  MatrixXd C;
  double period = 0.0;  // seconds

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

// Validates shapes and period; throws std::invalid_argument on mismatch.
Dynamics make_dynamics(MatrixXd A, MatrixXd B, MatrixXd C, double period);

/// Forward-Euler mass-damper per axis, three decoupled axes, state [p; v].
///
///   A = [[I, T I], [0, (1 - cT/m) I]],  B = [[0], [(T/m) I]],  C = [I 0]
///
/// Requires m > 0, c >= 0, T > 0 and cT/m < 1; anything else throws
/// std::invalid_argument.
Dynamics discretize_mass_damper(double mass_kg, double damping_Ns_per_m,
                                double period_s);

// Returns A x + B F. Throws std::invalid_argument on dimension mismatch.
VectorXd step(const Dynamics& dyn, const VectorXd& x, const VectorXd& force);

struct StylusState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  VectorXd packed() const;
  static StylusState unpack(const VectorXd& x);
};

struct WorkspaceBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  static WorkspaceBox centered(double halfwidth_m);

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }
  bool contains(const Vec3& p) const;
  void validate() const;
};

struct ReferenceSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct PlantParams {
  double mass_kg = 0.0;
  double damping_Ns_per_m = 0.0;
  double period_s = 0.0;
  double workspace_halfwidth_m = 0.0;

  Dynamics dynamics() const {
    return discretize_mass_damper(mass_kg, damping_Ns_per_m, period_s);
  }
  WorkspaceBox workspace() const {
    return WorkspaceBox::centered(workspace_halfwidth_m);
  }
};

}  // namespace softnash
