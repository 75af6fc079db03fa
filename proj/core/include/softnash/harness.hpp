#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softnash/config.hpp"
#include "softnash/trial.hpp"

namespace softnash {

/// Min-max normalize RMS (p) and conflict (f) over the batch and return
/// 0.5 (1 - p) + 0.5 (1 - f) per row. A dimension with max == min normalizes
/// to 0 for every row. Throws std::invalid_argument on an empty batch or
/// non-finite values.
std::vector<double> balanced_scores(
    std::span<const std::pair<double, double>> rms_and_conflict);

struct TrialRow {
  Mode mode;
  std::uint64_t seed = 0;
  std::optional<TrialMetrics> metrics;  // empty when the trial failed
  std::optional<double> balanced_score;
  std::string error;
};

// Descriptive statistics with a normal-approximation 95% interval
// mean +- 1.96 s / sqrt(n) (s is the n-1 sample deviation; 0 for n = 1).
struct Stat {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

Stat describe(std::span<const double> values);

struct ModeSummary {
  Mode mode;
  std::size_t trials = 0;
  std::size_t failed = 0;
  Stat rms_m;
  Stat conflict_J;
  Stat assist_Ns;
  Stat nfi;
  std::size_t nfi_undefined = 0;  // excluded from the nfi statistics
  Stat balanced_score;
  Stat spectral_radius;
};

struct BatchResult {
  std::vector<TrialRow> rows;  // ordered by (mode index, seed index)
  std::vector<ModeSummary> modes;
  std::optional<Mode> best_mode;  // argmax of mean BalancedScore
  std::string config_hash;
};

// Runs `fn(i)` for i in [0, count) on at most `workers` threads
// (0: hardware concurrency).
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

/// One trial per (mode, seed) on a bounded worker pool. Divergent trials are
/// reported in their row and excluded from normalization; the batch runs on.
BatchResult run_experiment(const ExperimentConfig& cfg);

// trials.csv: mode,tau,seed,rms_m,conflict_J,assist_Ns,nfi,balanced_score,spectral_radius
// Undefined NFI and failed-trial fields are written as NA.
void write_trials_csv(const BatchResult& result, std::ostream& out);
void write_summary_json(const BatchResult& result, std::ostream& out);

// Writes the formats requested in cfg into cfg.output_dir.
void write_outputs(const ExperimentConfig& cfg, const BatchResult& result);

}  // namespace softnash
