#include "softnash/session.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace softnash::session {

using nlohmann::json;

namespace {

double finite_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ProtocolError(std::string("field '") + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v))
    throw ProtocolError(std::string("field '") + key + "' must be finite");
  return v;
}

json xy(const Vec3& v) { return json::array({v.x(), v.y()}); }

json nullable(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ClientMessage parse_client_message(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON");
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw ProtocolError("frame needs a string 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "hello") return Hello{};
  if (type == "reset") return Reset{};
  if (type == "end") return End{};
  if (type == "input") {
    if (!j.contains("seq") || !j.at("seq").is_number_unsigned())
      throw ProtocolError("input.seq must be an unsigned integer");
    const auto& ptr = j.contains("pointer") ? j.at("pointer") : json();
    if (!ptr.is_array() || ptr.size() != 2 || !ptr[0].is_number() ||
        !ptr[1].is_number()) {
      throw ProtocolError("input.pointer must be [x, y]");
    }
    Input in{j.at("seq").get<std::uint64_t>(), ptr[0].get<double>(),
             ptr[1].get<double>()};
    if (!std::isfinite(in.x) || !std::isfinite(in.y))
      throw ProtocolError("input.pointer must be finite");
    return in;
  }
  if (type == "set_mode") {
    if (!j.contains("mode") || !j.at("mode").is_string())
      throw ProtocolError("set_mode.mode must be a string");
    SetMode m{j.at("mode").get<std::string>(), 0.0};
    if (j.contains("tau")) m.tau = finite_number(j, "tau");
    return m;
  }
  throw ProtocolError("unknown frame type '" + type + "'");
}

std::string error_frame(std::string_view detail) {
  return json{{"type", "error"}, {"detail", detail}}.dump();
}

Session::Session(const ExperimentConfig& cfg)
    : cfg_(cfg),
      accumulator_(cfg.trial.dynamics.period) {
  cfg_.trial.validate();
  if (cfg_.session.decimation < 1)
    throw std::invalid_argument("session decimation must be >= 1");
  if (!(cfg_.session.rms_window_s > 0.0))
    throw std::invalid_argument("session rms window must be > 0");
  value_ = std::make_shared<const RiccatiSolution>(
      solve_robot_value(cfg_.trial.dynamics, cfg_.trial.weights));
  window_len_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(cfg_.session.rms_window_s / period_s())));
  set_mode(cfg_.session.initial_mode);
  restart();
}

void Session::set_mode(Mode mode) {
  policy_.emplace(mode, cfg_.trial.dynamics, cfg_.trial.weights, value_->P,
                  cfg_.trial.classic);
  state_.mode = mode;
}

void Session::restart() {
  TrajectoryConfig traj = cfg_.trial.trajectory;
  traj.seed = cfg_.session.seed ^ kTrajectoryStreamTag;
  traj.box = cfg_.trial.workspace;
  traj.period_s = period_s();
  traj.duration_s = cfg_.trial.duration_s;
  trajectory_.emplace(traj);

  const Vec3 center = cfg_.trial.workspace.center();
  state_.stylus = StylusState{center, Vec3::Zero()};
  state_.pointer = center;
  state_.assist = Vec3::Zero();
  state_.metrics = LiveMetrics{};

  record_ = TrialRecord{};
  record_.mode = state_.mode.name();
  record_.tau = state_.mode.tau;
  record_.seed = cfg_.session.seed;
  record_.config_hash = cfg_.trial.config_hash;
  record_.period_s = period_s();
  accumulator_ = MetricAccumulator(period_s());
  window_.clear();
}

std::string Session::handshake() const {
  const auto& box = cfg_.trial.workspace;
  json modes = json::array();
  for (const auto& m : standard_modes()) modes.push_back(m.name());
  return json{
      {"type", "config"},
      {"units", {{"length", "m"}, {"force", "N"}, {"time", "s"}, {"energy", "J"}}},
      {"workspace", {{"min", xy(box.min)}, {"max", xy(box.max)}}},
      {"period_s", period_s()},
      {"state_rate_hz", 1.0 / (period_s() * cfg_.session.decimation)},
      {"coupling",
       {{"kp_N_per_m", cfg_.session.coupling_kp},
        {"kd_Ns_per_m", cfg_.session.coupling_kd}}},
      {"force_cap_N", cfg_.trial.force_cap_N},
      {"mode", state_.mode.name()},
      {"tau", state_.mode.tau},
      {"modes", modes}}
      .dump();
}

void Session::apply(const ClientMessage& msg) {
  std::visit(
      [this](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Input>) {
          if (state_.last_seq && m.seq <= *state_.last_seq) return;  // stale
          state_.last_seq = m.seq;
          const auto& box = cfg_.trial.workspace;
          state_.pointer = box.clamp(Vec3(m.x, m.y, box.center().z()));
        } else if constexpr (std::is_same_v<T, SetMode>) {
          const Mode mode = parse_mode(m.mode, m.tau);
          set_mode(mode);
          record_.mode = mode.name();
          record_.tau = mode.tau;
        } else if constexpr (std::is_same_v<T, Reset>) {
          restart();
        } else if constexpr (std::is_same_v<T, End>) {
          ended_ = true;
        }
      },
      msg);
}

std::optional<std::string> Session::handle(std::string_view text) {
  try {
    const auto msg = parse_client_message(text);
    apply(msg);
    if (std::holds_alternative<Hello>(msg)) return handshake();
    if (std::holds_alternative<End>(msg)) return final_frame();
    return std::nullopt;
  } catch (const std::exception& e) {
    return error_frame(e.what());
  }
}

std::optional<std::string> Session::tick() {
  const ReferenceSample raw = trajectory_->next();
  const double z = cfg_.trial.workspace.center().z();
  state_.target = ReferenceSample{Vec3(raw.position.x(), raw.position.y(), z),
                                  Vec3(raw.velocity.x(), raw.velocity.y(), 0.0)};

  const auto& s = state_.stylus;
  const Vec3 u_h = cfg_.session.coupling_kp * (state_.pointer - s.position) -
                   cfg_.session.coupling_kd * s.velocity;
  const Vec3 u_r =
      clip_radial(policy_->force(s, state_.target, u_h), cfg_.trial.force_cap_N);
  state_.assist = u_r;

  record_.push(s, state_.target, u_h, u_r);
  accumulator_.add(record_.error.back(), u_r, s.velocity);
  window_.push_back(record_.error.back().squaredNorm());
  if (window_.size() > window_len_) window_.pop_front();
  double window_sum = 0.0;
  for (double v : window_) window_sum += v;

  state_.metrics.rms_window =
      std::sqrt(window_sum / static_cast<double>(window_.size()));
  state_.metrics.conflict = accumulator_.conflict_energy();
  state_.metrics.assist = accumulator_.assist_effort();
  state_.metrics.nfi = accumulator_.nfi();

  state_.stylus = advance_stylus(cfg_.trial.dynamics, cfg_.trial.workspace, s,
                                 u_h + u_r);
  ++state_.tick;
  if (state_.tick % static_cast<std::uint64_t>(cfg_.session.decimation) == 0)
    return state_frame();
  return std::nullopt;
}

std::string Session::state_frame() const {
  const auto& m = state_.metrics;
  return json{{"type", "state"},
              {"tick", state_.tick},
              {"stylus", xy(state_.stylus.position)},
              {"target", xy(state_.target.position)},
              {"assist", xy(state_.assist)},
              {"mode", state_.mode.name()},
              {"tau", state_.mode.tau},
              {"metrics",
               {{"rms_window", m.rms_window},
                {"conflict", m.conflict},
                {"assist", m.assist},
                {"nfi", nullable(m.nfi)}}}}
      .dump();
}

FinalReport Session::finalize() const {
  FinalReport report;
  report.duration_s = static_cast<double>(record_.size()) * period_s();
  report.partial = report.duration_s < cfg_.session.min_duration_s;
  if (record_.size() > 0) report.metrics = compute_metrics(record_);
  HumanModel coupling;
  coupling.kp = cfg_.session.coupling_kp;
  coupling.kd = cfg_.session.coupling_kd;
  report.metrics.spectral_radius =
      closed_loop_report(cfg_.trial.dynamics, policy_->feedback(),
                         policy_->alignment(), coupling.linear_gain());
  return report;
}

std::string Session::final_frame() const {
  const auto report = finalize();
  const auto& m = report.metrics;
  return json{{"type", "final"},
              {"metrics",
               {{"rms", m.rms_m},
                {"conflict", m.conflict_J},
                {"assist", m.assist_Ns},
                {"nfi", nullable(m.nfi)},
                {"spectral_radius", m.spectral_radius},
                {"duration_s", report.duration_s},
                {"steps", record_.size()},
                {"partial", report.partial}}}}
      .dump();
}

void Session::write_trace(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  write_trace_csv(record_, out);
}

}  // namespace softnash::session
