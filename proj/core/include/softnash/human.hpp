#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "softnash/model.hpp"
#include "softnash/random.hpp"

namespace softnash {

struct DeviationEpisode {
  double start_s = 0.0;
  double end_s = 0.0;
  Vec3 offset = Vec3::Zero();  // meters, added to the target while active
};

/// Reactive synthetic operator: delayed PD pull toward the (possibly offset)
/// target plus white force noise.
struct HumanModel {
  double kp = 0.0;          // N/m
  double kd = 0.0;          // N*s/m
  int delay_steps = 0;
  double noise_sigma = 0.0;  // N, per axis
  std::vector<DeviationEpisode> deviations;

  // Throws std::invalid_argument for negative gains, negative delay,
  // inverted or overlapping episodes, or episodes past `duration_s`.
  void validate(double duration_s) const;

  // Offset active at time t, if any (intervals are half-open [start, end)).
  std::optional<Vec3> active_offset(double t) const;

  // Linear state feedback u_h = K_h xi on the error state [p-q; v-qdot].
  MatrixXd linear_gain() const;
};

struct TrajectoryConfig {
  std::uint64_t seed = 0;
  double filter = 1.0;      // latent velocity low-pass coefficient in (0, 1]
  double amplitude = 0.0;   // m/s, drive noise std-dev per step
  WorkspaceBox box;
  double duration_s = 0.0;
  double period_s = 0.0;

  void validate() const;
  std::size_t steps() const;
};

// Streaming form of the target generator. Samples are produced one ahead so
// that the velocity can be a forward difference.
class TrajectoryGenerator {
 public:
  explicit TrajectoryGenerator(const TrajectoryConfig& cfg);

  ReferenceSample next();

 private:
  Vec3 advance();

  TrajectoryConfig cfg_;
  GaussianStream noise_;
  Vec3 latent_velocity_ = Vec3::Zero();
  Vec3 current_;
  Vec3 upcoming_;
};

// q_0 = box center, w_{k+1} = (1-f) w_k + f eta_k, q_{k+1} = clamp(q_k + w_k T),
// qdot_k = (q_{k+1} - q_k) / T. One sample per step of the configured duration.
std::vector<ReferenceSample> generate_trajectory(const TrajectoryConfig& cfg);

struct HumanObservation {
  StylusState state;
  ReferenceSample reference;
};

/// Human force at step k. Reads history[k - delay] (zeros before the start),
/// shifts its target by the deviation active at step k, and adds one
/// Gaussian draw per axis from `noise` scaled by noise_sigma. Three draws are
/// consumed on every call, even for sigma = 0.
Vec3 human_command(const HumanModel& model,
                   std::span<const HumanObservation> history, std::size_t k,
                   double period_s, GaussianStream& noise);

}  // namespace softnash
