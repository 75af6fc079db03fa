#include "softnash/trial.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "softnash/format.hpp"
#include "softnash/random.hpp"

namespace softnash {

void TrialConfig::validate() const {
  if (!(duration_s > 2.0 * fade_s) || !(fade_s >= 0.0))
    throw std::invalid_argument("trial duration must exceed twice the fade time");
  if (!(force_cap_N > 0.0)) throw std::invalid_argument("force cap must be > 0");
  if (dynamics.state_dim() != 6 || dynamics.input_dim() != 3)
    throw std::invalid_argument("trial expects the 3-axis stylus plant");
  if (mode.kind == ModeKind::kNash) (void)Softness(mode.tau);
  workspace.validate();
  weights.validate();
  human.validate(duration_s);
  trajectory_for_seed().validate();
  if (std::abs(trajectory.period_s - dynamics.period) > 1e-15)
    throw std::invalid_argument("trajectory and plant periods differ");
}

std::size_t TrialConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration_s / dynamics.period));
}

TrajectoryConfig TrialConfig::trajectory_for_seed() const {
  TrajectoryConfig t = trajectory;
  t.seed = seed ^ kTrajectoryStreamTag;
  t.duration_s = duration_s;
  t.period_s = dynamics.period;
  t.box = workspace;
  return t;
}

void TrialRecord::reserve(std::size_t n) {
  x.reserve(n);
  u_h.reserve(n);
  u_r.reserve(n);
  ref.reserve(n);
  error.reserve(n);
}

void TrialRecord::push(const StylusState& state,
                       const ReferenceSample& reference, const Vec3& human,
                       const Vec3& robot) {
  x.push_back(state);
  ref.push_back(reference);
  u_h.push_back(human);
  u_r.push_back(robot);
  error.push_back(state.position - reference.position);
}

double fade_factor(std::size_t k, std::size_t n, double period_s,
                   double fade_s) {
  if (n == 0) return 0.0;
  const double t = static_cast<double>(k) * period_s;
  const double t_end = static_cast<double>(n - 1) * period_s;
  if (fade_s <= 0.0) return (k == 0 || k + 1 == n) ? 0.0 : 1.0;
  return std::clamp(std::min(t, t_end - t) / fade_s, 0.0, 1.0);
}

namespace {

std::shared_ptr<const RiccatiSolution> value_for(const TrialConfig& cfg) {
  if (cfg.value) return cfg.value;
  return std::make_shared<const RiccatiSolution>(
      solve_robot_value(cfg.dynamics, cfg.weights));
}

}  // namespace

StylusState advance_stylus(const Dynamics& dyn, const WorkspaceBox& box,
                           const StylusState& state, const Vec3& force) {
  VectorXd x = dyn.A * state.packed() + dyn.B * force;
  for (int i = 0; i < 3; ++i) {
    if (x[i] < box.min[i] || x[i] > box.max[i]) {
      x[i] = std::clamp(x[i], box.min[i], box.max[i]);
      x[3 + i] = 0.0;
    }
  }
  return StylusState::unpack(x);
}

TrialRecord simulate_trial(const TrialConfig& cfg) {
  cfg.validate();
  const auto value = value_for(cfg);
  const AssistPolicy policy(cfg.mode, cfg.dynamics, cfg.weights, value->P,
                            cfg.classic);
  const auto reference = generate_trajectory(cfg.trajectory_for_seed());
  GaussianStream human_noise(cfg.seed ^ kHumanNoiseStreamTag);

  const std::size_t n = reference.size();
  const double T = cfg.dynamics.period;

  TrialRecord rec;
  rec.mode = cfg.mode.name();
  rec.tau = cfg.mode.tau;
  rec.seed = cfg.seed;
  rec.config_hash = cfg.config_hash;
  rec.period_s = T;
  rec.reserve(n);

  std::vector<HumanObservation> history;
  history.reserve(n);

  StylusState state;
  state.position = cfg.workspace.center();
  for (std::size_t k = 0; k < n; ++k) {
    history.push_back({state, reference[k]});
    const Vec3 u_h = human_command(cfg.human, history, k, T, human_noise);
    Vec3 u_r = policy.force(state, reference[k], u_h);
    u_r *= fade_factor(k, n, T, cfg.fade_s);
    u_r = clip_radial(u_r, cfg.force_cap_N);
    rec.push(state, reference[k], u_h, u_r);

    state = advance_stylus(cfg.dynamics, cfg.workspace, state, u_h + u_r);
    if (!state.position.allFinite() || !state.velocity.allFinite()) {
      throw TrialDivergence(rec.mode + " seed " + std::to_string(cfg.seed) +
                                ": state became non-finite at step " +
                                std::to_string(k),
                            k);
    }
  }
  return rec;
}

void MetricAccumulator::add(const Vec3& error, const Vec3& robot_force,
                            const Vec3& velocity) {
  ++count_;
  squared_error_sum_ += error.squaredNorm();
  conflict_power_sum_ += std::max(0.0, -robot_force.dot(velocity));
  force_norm_sum_ += robot_force.norm();
}

double MetricAccumulator::rms() const {
  if (count_ == 0) throw std::invalid_argument("rms of an empty series");
  return std::sqrt(squared_error_sum_ / static_cast<double>(count_));
}

std::optional<double> MetricAccumulator::nfi() const {
  const double assist = assist_effort();
  if (assist == 0.0) return std::nullopt;
  return conflict_energy() / assist;
}

namespace {

MetricAccumulator accumulate(const TrialRecord& rec) {
  if (rec.size() == 0) throw std::invalid_argument("empty trial record");
  MetricAccumulator acc(rec.period_s);
  for (std::size_t k = 0; k < rec.size(); ++k)
    acc.add(rec.error[k], rec.u_r[k], rec.x[k].velocity);
  return acc;
}

}  // namespace

double rms_error(const TrialRecord& rec) { return accumulate(rec).rms(); }
double conflict_energy(const TrialRecord& rec) {
  return accumulate(rec).conflict_energy();
}
double assist_effort(const TrialRecord& rec) {
  return accumulate(rec).assist_effort();
}
std::optional<double> nfi(const TrialRecord& rec) {
  return accumulate(rec).nfi();
}

TrialMetrics compute_metrics(const TrialRecord& rec) {
  const auto acc = accumulate(rec);
  TrialMetrics m;
  m.rms_m = acc.rms();
  m.conflict_J = acc.conflict_energy();
  m.assist_Ns = acc.assist_effort();
  m.nfi = acc.nfi();
  return m;
}

double trial_spectral_radius(const TrialConfig& cfg) {
  const auto value = value_for(cfg);
  const AssistPolicy policy(cfg.mode, cfg.dynamics, cfg.weights, value->P,
                            cfg.classic);
  return closed_loop_report(cfg.dynamics, policy.feedback(), policy.alignment(),
                            cfg.human.linear_gain());
}

TrialOutcome run_trial(const TrialConfig& cfg) {
  TrialConfig resolved = cfg;
  resolved.value = value_for(cfg);
  TrialOutcome out;
  out.record = simulate_trial(resolved);
  out.metrics = compute_metrics(out.record);
  out.metrics.spectral_radius = trial_spectral_radius(resolved);
  return out;
}

void write_trace_csv(const TrialRecord& rec, std::ostream& out) {
  out << "k,t,px,py,pz,vx,vy,vz,qx,qy,qz,uhx,uhy,uhz,urx,ury,urz\n";
  auto put3 = [&out](const Vec3& v) {
    for (int i = 0; i < 3; ++i) out << ',' << format_double(v[i]);
  };
  for (std::size_t k = 0; k < rec.size(); ++k) {
    out << k << ',' << format_double(static_cast<double>(k) * rec.period_s);
    put3(rec.x[k].position);
    put3(rec.x[k].velocity);
    put3(rec.ref[k].position);
    put3(rec.u_h[k]);
    put3(rec.u_r[k]);
    out << '\n';
  }
}

TrialRecord read_trace_csv(std::istream& in, double period_s) {
  TrialRecord rec;
  rec.period_s = period_s;
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,t,px,py,pz,vx,vy,vz,qx,qy,qz,uhx,uhy,uhz,urx,ury,urz") {
    throw std::runtime_error("trace CSV: unexpected header");
  }
  std::vector<double> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    fields.clear();
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 17)
      throw std::runtime_error("trace CSV: expected 17 columns");
    auto v3 = [&fields](int at) {
      return Vec3(fields[at], fields[at + 1], fields[at + 2]);
    };
    StylusState s{v3(2), v3(5)};
    ReferenceSample q{v3(8), Vec3::Zero()};
    rec.push(s, q, v3(11), v3(14));
  }
  return rec;
}

}  // namespace softnash
