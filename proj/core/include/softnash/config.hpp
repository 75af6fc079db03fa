#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "softnash/controller.hpp"
#include "softnash/trial.hpp"

namespace softnash {

struct SessionSettings {
  double coupling_kp = 0.0;   // N/m, pointer -> force spring
  double coupling_kd = 0.0;   // N*s/m, velocity damping
  double rms_window_s = 1.0;
  int decimation = 2;         // emit a state frame every n-th tick
  double min_duration_s = 1.0;
  Mode initial_mode;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::vector<Mode> modes;
  std::vector<std::uint64_t> seeds;
  TrialConfig trial;  // template; mode and seed are set per trial
  std::filesystem::path output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};
  int parallel = 0;  // 0: hardware concurrency
  SessionSettings session;

  void validate() const;
};

/// Parses the JSON configuration document. Every numeric default lives in the
/// document; missing keys are errors. Keys starting with '_' are comments.
/// Throws std::invalid_argument with the offending key path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Path of the bundled default configuration (compile-time location).
std::filesystem::path default_config_path();

}  // namespace softnash
