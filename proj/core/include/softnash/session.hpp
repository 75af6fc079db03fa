#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "softnash/assist.hpp"
#include "softnash/config.hpp"
#include "softnash/human.hpp"
#include "softnash/trial.hpp"

namespace softnash::session {

// Client -> server frames.
struct Hello {};
struct Input {
  std::uint64_t seq = 0;
  double x = 0.0;  // meters
  double y = 0.0;
};
struct SetMode {
  std::string mode;
  double tau = 0.0;
};
struct Reset {};
struct End {};

using ClientMessage = std::variant<Hello, Input, SetMode, Reset, End>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ProtocolError for malformed JSON, unknown types or bad fields.
ClientMessage parse_client_message(std::string_view text);

std::string error_frame(std::string_view detail);

struct LiveMetrics {
  double rms_window = 0.0;
  double conflict = 0.0;
  double assist = 0.0;
  std::optional<double> nfi;
};

struct SessionState {
  StylusState stylus;
  ReferenceSample target;
  Vec3 pointer = Vec3::Zero();
  Vec3 assist = Vec3::Zero();
  Mode mode;
  std::uint64_t tick = 0;
  std::optional<std::uint64_t> last_seq;
  LiveMetrics metrics;
};

struct FinalReport {
  TrialMetrics metrics;
  bool partial = false;
  double duration_s = 0.0;
};

/// One interactive session: the connected pointer replaces the synthetic
/// human through a virtual coupling u_h = K_c (pointer - p) - K_cd v. All
/// mutation happens through handle() and tick(), which the host calls from
/// a single thread. The UI works in the x-y plane; z stays pinned at the
/// workspace center.
class Session {
 public:
  explicit Session(const ExperimentConfig& cfg);

  // {"type":"config",...}: units, workspace, rates and coupling gains.
  std::string handshake() const;

  // Applies one inbound frame. Returns a frame to send immediately (config
  // on hello, final on end, error on malformed input), if any. Errors never
  // end the session.
  std::optional<std::string> handle(std::string_view text);
  void apply(const ClientMessage& msg);

  // One control step. Returns the state frame on every decimation-th tick.
  std::optional<std::string> tick();

  FinalReport finalize() const;
  std::string final_frame() const;

  const SessionState& state() const { return state_; }
  const TrialRecord& record() const { return record_; }
  bool ended() const { return ended_; }
  double period_s() const { return cfg_.trial.dynamics.period; }

  void write_trace(const std::filesystem::path& path) const;

 private:
  void restart();
  void set_mode(Mode mode);
  std::string state_frame() const;

  ExperimentConfig cfg_;
  std::shared_ptr<const RiccatiSolution> value_;
  std::optional<AssistPolicy> policy_;
  std::optional<TrajectoryGenerator> trajectory_;
  TrialRecord record_;
  MetricAccumulator accumulator_;
  std::deque<double> window_;
  std::size_t window_len_ = 1;
  SessionState state_;
  bool ended_ = false;
};

}  // namespace softnash::session
