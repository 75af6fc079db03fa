#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "softnash/assist.hpp"
#include "softnash/controller.hpp"
#include "softnash/human.hpp"
#include "softnash/model.hpp"
#include "softnash/riccati.hpp"

namespace softnash {

struct TrialConfig {
  Mode mode;
  double duration_s = 60.0;
  double fade_s = 0.5;
  double force_cap_N = 5.0;
  Dynamics dynamics;
  WorkspaceBox workspace;
  CostWeights weights;
  ClassicGains classic;
  HumanModel human;
  TrajectoryConfig trajectory;  // seed is derived from `seed`
  std::uint64_t seed = 0;
  std::string config_hash;

  // Optional shared robot value function; solved on demand when empty.
  std::shared_ptr<const RiccatiSolution> value;

  void validate() const;
  std::size_t steps() const;
  TrajectoryConfig trajectory_for_seed() const;
};

struct TrialRecord {
  std::string mode;
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  double period_s = 0.0;

  std::vector<StylusState> x;
  std::vector<Vec3> u_h;
  std::vector<Vec3> u_r;  // post-fade, post-clip
  std::vector<ReferenceSample> ref;
  std::vector<Vec3> error;  // C x - q

  std::size_t size() const { return x.size(); }
  void reserve(std::size_t n);
  void push(const StylusState& state, const ReferenceSample& reference,
            const Vec3& human, const Vec3& robot);
};

class TrialDivergence : public std::runtime_error {
 public:
  TrialDivergence(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Linear ramp 0 -> 1 over the first fade window and 1 -> 0 over the last,
// for step k of n. Exactly 0 at k = 0 and k = n - 1.
double fade_factor(std::size_t k, std::size_t n, double period_s, double fade_s);

// x <- A x + B force, then any axis that left the workspace is put back on
// the wall with its velocity zeroed.
StylusState advance_stylus(const Dynamics& dyn, const WorkspaceBox& box,
                           const StylusState& state, const Vec3& force);

/// Closed-loop trial. Per step: human force, raw mode force, fade, radial
/// clip, then x <- A x + B (u_h + u_r) with the position held inside the
/// workspace. Deterministic in the config and seed. Throws TrialDivergence if
/// the state becomes non-finite.
TrialRecord simulate_trial(const TrialConfig& cfg);

/// Running sums shared by offline metrics and live sessions so both follow
/// one summation order.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(double period_s) : period_(period_s) {}

  void add(const Vec3& error, const Vec3& robot_force, const Vec3& velocity);

  std::size_t count() const { return count_; }
  double rms() const;
  double conflict_energy() const { return conflict_power_sum_ * period_; }
  double assist_effort() const { return force_norm_sum_ * period_; }
  std::optional<double> nfi() const;

 private:
  double period_;
  std::size_t count_ = 0;
  double squared_error_sum_ = 0.0;
  double conflict_power_sum_ = 0.0;
  double force_norm_sum_ = 0.0;
};

struct TrialMetrics {
  double rms_m = 0.0;
  double conflict_J = 0.0;
  double assist_Ns = 0.0;
  std::optional<double> nfi;  // undefined when assist effort is zero
  double spectral_radius = 0.0;
};

// sqrt(mean |e_k|^2). Empty records throw std::invalid_argument.
double rms_error(const TrialRecord& rec);
// sum_k max(0, -u_r . v) T
double conflict_energy(const TrialRecord& rec);
// sum_k |u_r| T
double assist_effort(const TrialRecord& rec);
std::optional<double> nfi(const TrialRecord& rec);

// Metrics of a record; spectral_radius is left at 0 (see evaluate_trial).
TrialMetrics compute_metrics(const TrialRecord& rec);

// Closed-loop spectral radius for the configured mode and linearized human.
double trial_spectral_radius(const TrialConfig& cfg);

struct TrialOutcome {
  TrialRecord record;
  TrialMetrics metrics;
};

TrialOutcome run_trial(const TrialConfig& cfg);

// CSV trace: k,t,px,py,pz,vx,vy,vz,qx,qy,qz,uhx,uhy,uhz,urx,ury,urz
void write_trace_csv(const TrialRecord& rec, std::ostream& out);
// Parses a trace written by write_trace_csv. Target velocity is not part of
// the trace and is left at zero. Throws std::runtime_error on malformed input.
TrialRecord read_trace_csv(std::istream& in, double period_s);

}  // namespace softnash
