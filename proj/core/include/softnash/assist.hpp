#pragma once

#include "softnash/controller.hpp"
#include "softnash/model.hpp"

namespace softnash {

struct ClassicGains {
  double kp = 0.0;  // N/m
  double kd = 0.0;  // N*s/m
};

// Mode-resolved assistance law with gains fixed at construction. All modes act
// on the error state xi = [p - q; v - qdot].
class AssistPolicy {
 public:
  AssistPolicy(Mode mode, const Dynamics& dyn, const CostWeights& weights,
               const MatrixXd& P_r, ClassicGains classic);

  // Raw (unfaded, unclipped) robot force.
  Vec3 force(const StylusState& x, const ReferenceSample& ref,
             const Vec3& u_h) const;

  const Mode& mode() const { return mode_; }

  // Gains in the form u_r = -K xi + Align u_h, for the closed-loop report.
  // CLASSIC maps to K = [kp I, kd I], Align = 0; NONE to zeros.
  const MatrixXd& feedback() const { return feedback_; }
  const MatrixXd& alignment() const { return alignment_; }

 private:
  Mode mode_;
  MatrixXd feedback_;
  MatrixXd alignment_;
};

VectorXd error_state(const StylusState& x, const ReferenceSample& ref);

/// Spectral radius of A - B K_r + B (Align + I) K_h, the error dynamics when
/// the plant is driven by u_h + u_r and the human acts as u_h = K_h xi.
double closed_loop_report(const Dynamics& dyn, const MatrixXd& K_r,
                          const MatrixXd& align, const MatrixXd& K_h);

// Radial saturation: scales u onto the ball of radius cap, keeping direction.
Vec3 clip_radial(const Vec3& u, double cap);

}  // namespace softnash
