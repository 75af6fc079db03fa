#include "softnash/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "softnash/format.hpp"

namespace softnash {

std::vector<double> balanced_scores(
    std::span<const std::pair<double, double>> rows) {
  if (rows.empty()) throw std::invalid_argument("balanced_scores: empty batch");
  double rms_min = rows[0].first, rms_max = rows[0].first;
  double conf_min = rows[0].second, conf_max = rows[0].second;
  for (const auto& [rms, conf] : rows) {
    if (!std::isfinite(rms) || !std::isfinite(conf))
      throw std::invalid_argument("balanced_scores: non-finite metric");
    rms_min = std::min(rms_min, rms);
    rms_max = std::max(rms_max, rms);
    conf_min = std::min(conf_min, conf);
    conf_max = std::max(conf_max, conf);
  }
  auto normalize = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
  };
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (const auto& [rms, conf] : rows) {
    const double p = normalize(rms, rms_min, rms_max);
    const double f = normalize(conf, conf_min, conf_max);
    scores.push_back(0.5 * (1.0 - p) + 0.5 * (1.0 - f));
  }
  return scores;
}

Stat describe(std::span<const double> values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  const double half = 1.96 * s.std_dev / std::sqrt(static_cast<double>(s.count));
  s.ci95_low = s.mean - half;
  s.ci95_high = s.mean + half;
  return s;
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  std::size_t n_workers = workers > 0
                              ? static_cast<std::size_t>(workers)
                              : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, std::max<std::size_t>(count, 1));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

BatchResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  BatchResult result;
  result.config_hash = cfg.trial.config_hash;

  // P_r depends only on plant and weights: solve once, share read-only.
  auto value = std::make_shared<const RiccatiSolution>(
      solve_robot_value(cfg.trial.dynamics, cfg.trial.weights));

  const std::size_t n_seeds = cfg.seeds.size();
  result.rows.resize(cfg.modes.size() * n_seeds);
  parallel_for(result.rows.size(), cfg.parallel, [&](std::size_t i) {
    TrialConfig trial = cfg.trial;
    trial.mode = cfg.modes[i / n_seeds];
    trial.seed = cfg.seeds[i % n_seeds];
    trial.value = value;
    TrialRow& row = result.rows[i];
    row.mode = trial.mode;
    row.seed = trial.seed;
    try {
      row.metrics = run_trial(trial).metrics;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  std::vector<std::pair<double, double>> points;
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (const auto& m = result.rows[i].metrics) {
      points.emplace_back(m->rms_m, m->conflict_J);
      scored.push_back(i);
    }
  }
  if (!points.empty()) {
    const auto scores = balanced_scores(points);
    for (std::size_t j = 0; j < scored.size(); ++j)
      result.rows[scored[j]].balanced_score = scores[j];
  }

  for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
    ModeSummary summary;
    summary.mode = cfg.modes[mi];
    std::vector<double> rms, conflict, assist, nfi, balanced, radius;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      const TrialRow& row = result.rows[mi * n_seeds + si];
      ++summary.trials;
      if (!row.metrics) {
        ++summary.failed;
        continue;
      }
      rms.push_back(row.metrics->rms_m);
      conflict.push_back(row.metrics->conflict_J);
      assist.push_back(row.metrics->assist_Ns);
      radius.push_back(row.metrics->spectral_radius);
      balanced.push_back(*row.balanced_score);
      if (row.metrics->nfi)
        nfi.push_back(*row.metrics->nfi);
      else
        ++summary.nfi_undefined;
    }
    summary.rms_m = describe(rms);
    summary.conflict_J = describe(conflict);
    summary.assist_Ns = describe(assist);
    summary.nfi = describe(nfi);
    summary.balanced_score = describe(balanced);
    summary.spectral_radius = describe(radius);
    result.modes.push_back(summary);
  }

  double best = -1.0;
  for (const auto& s : result.modes) {
    if (s.balanced_score.count > 0 && s.balanced_score.mean > best) {
      best = s.balanced_score.mean;
      result.best_mode = s.mode;
    }
  }
  return result;
}

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_double(*v) : "NA";
}

nlohmann::json stat_json(const Stat& s) {
  return {{"n", s.count},
          {"mean", s.mean},
          {"std", s.std_dev},
          {"ci95_normal_approx", {s.ci95_low, s.ci95_high}}};
}

}  // namespace

void write_trials_csv(const BatchResult& result, std::ostream& out) {
  out << "mode,tau,seed,rms_m,conflict_J,assist_Ns,nfi,balanced_score,"
         "spectral_radius\n";
  for (const auto& row : result.rows) {
    out << row.mode.name() << ',' << format_double(row.mode.tau) << ','
        << row.seed << ',';
    if (const auto& m = row.metrics) {
      out << format_double(m->rms_m) << ',' << format_double(m->conflict_J)
          << ',' << format_double(m->assist_Ns) << ',' << optional_number(m->nfi)
          << ',' << optional_number(row.balanced_score) << ','
          << format_double(m->spectral_radius);
    } else {
      out << "NA,NA,NA,NA,NA,NA";
    }
    out << '\n';
  }
}

void write_summary_json(const BatchResult& result, std::ostream& out) {
  nlohmann::json doc;
  doc["config_hash"] = result.config_hash;
  doc["rows"] = result.rows.size();
  doc["statistics"] = "descriptive only; 95% intervals use the normal approximation";
  doc["best_mode"] = result.best_mode ? result.best_mode->name() : "";
  auto& modes = doc["modes"] = nlohmann::json::array();
  for (const auto& s : result.modes) {
    nlohmann::json m;
    m["mode"] = s.mode.name();
    m["tau"] = s.mode.tau;
    m["trials"] = s.trials;
    m["failed"] = s.failed;
    m["rms_m"] = stat_json(s.rms_m);
    m["conflict_J"] = stat_json(s.conflict_J);
    m["assist_Ns"] = stat_json(s.assist_Ns);
    m["nfi"] = stat_json(s.nfi);
    m["nfi"]["undefined_excluded"] = s.nfi_undefined;
    m["balanced_score"] = stat_json(s.balanced_score);
    m["spectral_radius"] = stat_json(s.spectral_radius);
    modes.push_back(std::move(m));
  }
  auto& failures = doc["failures"] = nlohmann::json::array();
  for (const auto& row : result.rows) {
    if (!row.metrics)
      failures.push_back({{"mode", row.mode.name()}, {"seed", row.seed}, {"error", row.error}});
  }
  out << doc.dump(2) << '\n';
}

void write_outputs(const ExperimentConfig& cfg, const BatchResult& result) {
  std::filesystem::create_directories(cfg.output_dir);
  for (const auto& format : cfg.formats) {
    if (format == "csv") {
      std::ofstream out(cfg.output_dir / "trials.csv", std::ios::binary);
      write_trials_csv(result, out);
    } else if (format == "json") {
      std::ofstream out(cfg.output_dir / "summary.json", std::ios::binary);
      write_summary_json(result, out);
    } else {
      throw std::invalid_argument("unknown output format '" + format + "'");
    }
  }
}

}  // namespace softnash
