#pragma once

#include "softnash/config.hpp"
#include "softnash/trial.hpp"

namespace softnash::testing {

inline const ExperimentConfig& default_experiment() {
  static const ExperimentConfig cfg = load_config(default_config_path());
  return cfg;
}

inline TrialConfig default_trial(Mode mode, std::uint64_t seed = 1) {
  TrialConfig t = default_experiment().trial;
  t.mode = mode;
  t.seed = seed;
  return t;
}

// Record with constant period; vectors are pushed verbatim.
inline TrialRecord synthetic_record(double period_s) {
  TrialRecord r;
  r.period_s = period_s;
  return r;
}

inline void push_sample(TrialRecord& r, const Vec3& error, const Vec3& velocity,
                        const Vec3& robot) {
  r.push(StylusState{error, velocity}, ReferenceSample{}, Vec3::Zero(), robot);
}

}  // namespace softnash::testing
