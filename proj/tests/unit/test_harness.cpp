#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "softnash/format.hpp"
#include "softnash/harness.hpp"

using namespace softnash;
using softnash::testing::default_experiment;

namespace {

ExperimentConfig short_experiment() {
  ExperimentConfig cfg = default_experiment();
  cfg.trial.duration_s = 10.0;
  cfg.trial.human.deviations = {{2.0, 4.0, Vec3(0.03, 0, 0)}};
  cfg.seeds = {1, 2, 3};
  return cfg;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(BalancedScores, Extremes) {
  const std::vector<std::pair<double, double>> rows{{5, 0.1}, {10, 0.3}};
  EXPECT_EQ(balanced_scores(rows), (std::vector<double>{1.0, 0.0}));
}

TEST(BalancedScores, Midpoint) {
  const std::vector<std::pair<double, double>> rows{{5, 0.1}, {7.5, 0.2}, {10, 0.3}};
  const auto s = balanced_scores(rows);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_NEAR(s[1], 0.5, 1e-15);
  EXPECT_EQ(s[2], 0.0);
}

TEST(BalancedScores, DegenerateBatch) {
  const std::vector<std::pair<double, double>> same{{3, 0.2}, {3, 0.2}, {3, 0.2}};
  EXPECT_EQ(balanced_scores(same), (std::vector<double>{1.0, 1.0, 1.0}));
  const std::vector<std::pair<double, double>> flat_conflict{{1, 0}, {3, 0}};
  EXPECT_EQ(balanced_scores(flat_conflict), (std::vector<double>{1.0, 0.5}));
}

TEST(BalancedScores, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(balanced_scores({}), std::invalid_argument);
  const std::vector<std::pair<double, double>> bad{{1, NAN}};
  EXPECT_THROW(balanced_scores(bad), std::invalid_argument);
}

TEST(Describe, SampleStatistics) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = describe(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std_dev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.ci95_high - s.mean, 1.96 * s.std_dev / 2.0, 1e-15);
  const std::vector<double> one{7};
  EXPECT_EQ(describe(one).std_dev, 0.0);
  EXPECT_EQ(describe(one).ci95_low, 7.0);
  EXPECT_EQ(describe({}).count, 0u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int workers : {0, 1, 3, 16}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(RunExperiment, SingleTrialIsDegenerate) {
  auto cfg = short_experiment();
  cfg.modes = {Mode::nash(2)};
  cfg.seeds = {9};
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(*r.rows[0].balanced_score, 1.0);
  EXPECT_EQ(r.best_mode, Mode::nash(2));
}

TEST(RunExperiment, DefaultShapeIs96Rows) {
  const auto r = run_experiment(default_experiment());
  ASSERT_EQ(r.rows.size(), 96u);
  ASSERT_EQ(r.modes.size(), 8u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].mode, standard_modes()[i / 12]);
    EXPECT_EQ(r.rows[i].seed, i % 12 + 1);
    ASSERT_TRUE(r.rows[i].metrics) << r.rows[i].error;
    const double s = *r.rows[i].balanced_score;
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  // Somebody sits at each normalization minimum.
  double rms_min = INFINITY, conf_min = INFINITY;
  for (const auto& row : r.rows) {
    rms_min = std::min(rms_min, row.metrics->rms_m);
    conf_min = std::min(conf_min, row.metrics->conflict_J);
  }
  EXPECT_TRUE(std::any_of(r.rows.begin(), r.rows.end(),
                          [&](const TrialRow& row) { return row.metrics->rms_m == rms_min; }));
  const auto& none = r.modes.back();
  EXPECT_EQ(none.mode, Mode::none());
  EXPECT_EQ(none.nfi_undefined, 12u);
  EXPECT_EQ(none.nfi.count, 0u);
  EXPECT_EQ(none.conflict_J.mean, 0.0);
  EXPECT_EQ(conf_min, 0.0);
}

TEST(RunExperiment, OutputIndependentOfWorkerCount) {
  auto cfg = short_experiment();
  std::string reference;
  for (int workers : {1, 2, 5}) {
    cfg.parallel = workers;
    std::ostringstream csv;
    write_trials_csv(run_experiment(cfg), csv);
    if (reference.empty())
      reference = csv.str();
    else
      EXPECT_EQ(csv.str(), reference) << workers;
  }
}

TEST(RunExperiment, SummaryReconcilesWithCsv) {
  const auto cfg = short_experiment();
  const auto r = run_experiment(cfg);
  std::ostringstream csv, js;
  write_trials_csv(r, csv);
  write_summary_json(r, js);
  const auto rows = parse_csv(csv.str());
  ASSERT_EQ(rows.front(), (std::vector<std::string>{"mode", "tau", "seed", "rms_m", "conflict_J",
                                                    "assist_Ns", "nfi", "balanced_score",
                                                    "spectral_radius"}));
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_EQ(doc["rows"].get<std::size_t>(), rows.size() - 1);
  EXPECT_EQ(doc["config_hash"], cfg.trial.config_hash);
  EXPECT_EQ(doc["best_mode"], r.best_mode->name());

  std::map<std::string, std::map<std::string, std::vector<double>>> columns;
  std::map<std::string, int> na_nfi;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    ASSERT_EQ(c.size(), 9u);
    const char* names[] = {"rms_m", "conflict_J", "assist_Ns", "nfi", "balanced_score",
                           "spectral_radius"};
    for (int j = 0; j < 6; ++j) {
      if (c[3 + j] == "NA") {
        if (j == 3) na_nfi[c[0]]++;
        continue;
      }
      columns[c[0]][names[j]].push_back(parse_double(c[3 + j]));
    }
  }
  for (const auto& m : doc["modes"]) {
    const auto mode = m["mode"].get<std::string>();
    EXPECT_EQ(m["trials"].get<std::size_t>(), cfg.seeds.size());
    EXPECT_EQ(m["nfi"]["undefined_excluded"].get<int>(), na_nfi[mode]);
    for (const auto& [metric, values] : columns[mode]) {
      double sum = 0;
      for (double v : values) sum += v;
      EXPECT_NEAR(m[metric]["mean"].get<double>(), sum / values.size(), 1e-12)
          << mode << " " << metric;
      EXPECT_EQ(m[metric]["n"].get<std::size_t>(), values.size());
    }
  }
}

TEST(RunExperiment, FailuresAreReportedPerRow) {
  auto cfg = short_experiment();
  cfg.modes = {Mode::classic(), Mode::none()};
  cfg.trial.human.kp = INFINITY;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 6u);
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.metrics);
    EXPECT_FALSE(row.balanced_score);
    EXPECT_NE(row.error.find("non-finite"), std::string::npos);
  }
  EXPECT_FALSE(r.best_mode);
  EXPECT_EQ(r.modes[0].failed, 3u);
  std::ostringstream csv, js;
  write_trials_csv(r, csv);
  EXPECT_NE(csv.str().find("CLASSIC,0,1,NA,NA,NA,NA,NA,NA"), std::string::npos);
  write_summary_json(r, js);
  EXPECT_EQ(nlohmann::json::parse(js.str())["failures"].size(), 6u);
}

TEST(WriteOutputs, WritesRequestedFormats) {
  auto cfg = short_experiment();
  cfg.modes = {Mode::nash(1)};
  cfg.output_dir = std::filesystem::path(::testing::TempDir()) / "softnash_outputs";
  std::filesystem::remove_all(cfg.output_dir);
  cfg.formats = {"csv"};
  write_outputs(cfg, run_experiment(cfg));
  EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "trials.csv"));
  EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / "summary.json"));
  cfg.formats = {"xml"};
  EXPECT_THROW(write_outputs(cfg, run_experiment(cfg)), std::invalid_argument);
}
