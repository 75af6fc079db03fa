#include "softnash/human.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softnash {

void HumanModel::validate(double duration_s) const {
  if (!(kp >= 0.0) || !(kd >= 0.0))
    throw std::invalid_argument("human gains must be >= 0");
  if (delay_steps < 0) throw std::invalid_argument("human delay must be >= 0");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("human noise sigma must be >= 0");
  auto sorted = deviations;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& ep = sorted[i];
    if (!(ep.start_s >= 0.0) || !(ep.end_s > ep.start_s) ||
        ep.end_s > duration_s) {
      throw std::invalid_argument("deviation episode outside the trial");
    }
    if (i > 0 && ep.start_s < sorted[i - 1].end_s)
      throw std::invalid_argument("deviation episodes overlap");
  }
}

std::optional<Vec3> HumanModel::active_offset(double t) const {
  for (const auto& ep : deviations) {
    if (t >= ep.start_s && t < ep.end_s) return ep.offset;
  }
  return std::nullopt;
}

MatrixXd HumanModel::linear_gain() const {
  MatrixXd K = MatrixXd::Zero(3, 6);
  K.leftCols(3) = -kp * Eigen::Matrix3d::Identity();
  K.rightCols(3) = -kd * Eigen::Matrix3d::Identity();
  return K;
}

void TrajectoryConfig::validate() const {
  if (!(filter > 0.0 && filter <= 1.0))
    throw std::invalid_argument("trajectory filter must lie in (0, 1]");
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("trajectory amplitude must be >= 0");
  if (!(period_s > 0.0)) throw std::invalid_argument("period must be > 0");
  if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be > 0");
  box.validate();
}

std::size_t TrajectoryConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration_s / period_s));
}

TrajectoryGenerator::TrajectoryGenerator(const TrajectoryConfig& cfg)
    : cfg_(cfg), noise_(cfg.seed), current_(cfg.box.center()),
      upcoming_(cfg.box.center()) {
  cfg_.validate();
  upcoming_ = advance();
}

Vec3 TrajectoryGenerator::advance() {
  Vec3 eta;
  for (int i = 0; i < 3; ++i) eta[i] = cfg_.amplitude * noise_.next();
  const Vec3 next = cfg_.box.clamp(upcoming_ + latent_velocity_ * cfg_.period_s);
  latent_velocity_ =
      (1.0 - cfg_.filter) * latent_velocity_ + cfg_.filter * eta;
  return next;
}

ReferenceSample TrajectoryGenerator::next() {
  ReferenceSample sample{current_, (upcoming_ - current_) / cfg_.period_s};
  current_ = upcoming_;
  upcoming_ = advance();
  return sample;
}

std::vector<ReferenceSample> generate_trajectory(const TrajectoryConfig& cfg) {
  TrajectoryGenerator gen(cfg);
  std::vector<ReferenceSample> out(cfg.steps());
  for (auto& s : out) s = gen.next();
  return out;
}

Vec3 human_command(const HumanModel& model,
                   std::span<const HumanObservation> history, std::size_t k,
                   double period_s, GaussianStream& noise) {
  HumanObservation seen{};
  const auto delay = static_cast<std::size_t>(model.delay_steps);
  if (k >= delay) {
    const auto j = k - delay;
    if (j >= history.size())
      throw std::out_of_range("human_command: history too short");
    seen = history[j];
  }
  Vec3 target = seen.reference.position;
  if (auto offset = model.active_offset(static_cast<double>(k) * period_s))
    target += *offset;

  Vec3 u = model.kp * (target - seen.state.position) +
           model.kd * (seen.reference.velocity - seen.state.velocity);
  for (int i = 0; i < 3; ++i) u[i] += model.noise_sigma * noise.next();
  return u;
}

}  // namespace softnash
