// softnash: batch experiments, single trials, and the live session server.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softnash/config.hpp"
#include "softnash/format.hpp"
#include "softnash/harness.hpp"
#include "softnash/trial.hpp"

#ifdef SOFTNASH_WITH_SERVER
#include "softnash/server.hpp"
#endif

namespace fs = std::filesystem;
using namespace softnash;

namespace {

ExperimentConfig load(const std::optional<fs::path>& path) {
  return load_config(path ? *path : default_config_path());
}

void print_batch(const BatchResult& result, const ExperimentConfig& cfg,
                 double seconds) {
  std::size_t failed = 0;
  for (const auto& row : result.rows) failed += row.metrics ? 0 : 1;
  std::cout << result.rows.size() << " trials (" << failed << " failed) in "
            << format_double(seconds) << " s, config " << result.config_hash
            << '\n';
  std::cout << "mode        rms_mm    conflict_J   balanced\n";
  for (const auto& m : result.modes) {
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %8.3f %12.5f %10.4f\n",
                  m.mode.name().c_str(), m.rms_m.mean * 1e3, m.conflict_J.mean,
                  m.balanced_score.mean);
    std::cout << line;
  }
  if (result.best_mode) {
    std::cout << "best mode: " << result.best_mode->name() << '\n';
  } else {
    std::cout << "best mode: none (all trials failed)\n";
  }
  std::cout << "outputs: " << cfg.output_dir.string() << '\n';
}

int run_batch(ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_experiment(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_outputs(cfg, result);
  print_batch(result, cfg, seconds);
  for (const auto& row : result.rows) {
    if (!row.metrics) {
      std::cerr << row.mode.name() << " seed " << row.seed << ": " << row.error
                << '\n';
    }
  }
  return 0;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - start);
    out.push_back(parse_double(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-Nash virtual fixture lab"};
  app.require_subcommand(1);

  std::optional<fs::path> config_path;
  std::optional<fs::path> out_dir;
  std::optional<int> parallel;

  auto* run = app.add_subcommand("run", "Run the configured mode x seed batch");
  run->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--parallel", parallel, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string mode_name;
  std::optional<double> tau;
  std::uint64_t seed = 1;
  bool dump_trace = false;
  auto* trial = app.add_subcommand("trial", "Run one trial and print its metrics");
  trial->add_option("--mode", mode_name, "CLASSIC, NONE, NASH or NASH_<tau>")->required();
  trial->add_option("--tau", tau, "Softness for --mode NASH")->check(CLI::NonNegativeNumber);
  trial->add_option("--seed", seed, "Participant seed");
  trial->add_flag("--dump-trace", dump_trace, "Write trace_<mode>_<seed>.csv");
  trial->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  trial->add_option("--out", out_dir, "Directory for the trace");

  std::string tau_grid = "0,1,2,3,5,8";
  std::uint64_t seed_count = 12;
  auto* sweep = app.add_subcommand(
      "sweep", "CLASSIC, NASH over a tau grid and NONE, seeds 1..n");
  sweep->add_option("--tau-grid", tau_grid, "Comma-separated softness values");
  sweep->add_option("--seeds", seed_count, "Number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--parallel", parallel, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);

  int port = 8080;
  std::string address = "127.0.0.1";
  std::optional<fs::path> static_dir;
  std::optional<fs::path> trace_dir;
  auto* serve = app.add_subcommand("serve", "Host interactive WebSocket sessions");
  serve->add_option("--port", port, "TCP port (0: ephemeral)")->check(CLI::Range(0, 65535));
  serve->add_option("--address", address, "Bind address");
  serve->add_option("--static", static_dir, "UI bundle directory")->check(CLI::ExistingDirectory);
  serve->add_option("--trace-dir", trace_dir, "Where finished session traces go");
  serve->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (parallel) cfg.parallel = *parallel;

    if (run->parsed()) return run_batch(cfg);

    if (sweep->parsed()) {
      cfg.modes.clear();
      cfg.modes.push_back(Mode::classic());
      for (double t : parse_grid(tau_grid)) cfg.modes.push_back(Mode::nash(t));
      cfg.modes.push_back(Mode::none());
      cfg.seeds.clear();
      for (std::uint64_t s = 1; s <= seed_count; ++s) cfg.seeds.push_back(s);
      return run_batch(cfg);
    }

    if (trial->parsed()) {
      Mode mode = parse_mode(mode_name, tau.value_or(0.0));
      if (tau && mode.kind == ModeKind::kNash && mode.tau != *tau) {
        throw std::invalid_argument("--tau disagrees with --mode " + mode_name);
      }
      TrialConfig tc = cfg.trial;
      tc.mode = mode;
      tc.seed = seed;
      const auto outcome = run_trial(tc);
      const auto& m = outcome.metrics;
      std::cout << "mode " << mode.name() << " seed " << seed << '\n'
                << "rms_m " << format_double(m.rms_m) << '\n'
                << "conflict_J " << format_double(m.conflict_J) << '\n'
                << "assist_Ns " << format_double(m.assist_Ns) << '\n'
                << "nfi " << (m.nfi ? format_double(*m.nfi) : "NA") << '\n'
                << "spectral_radius " << format_double(m.spectral_radius) << '\n';
      if (dump_trace) {
        const fs::path dir = out_dir ? *out_dir : fs::path(".");
        fs::create_directories(dir);
        const auto path =
            dir / ("trace_" + mode.name() + "_" + std::to_string(seed) + ".csv");
        std::ofstream out(path, std::ios::binary);
        write_trace_csv(outcome.record, out);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        std::cout << "trace " << path.string() << '\n';
      }
      return 0;
    }

    if (serve->parsed()) {
#ifdef SOFTNASH_WITH_SERVER
      ServerOptions options;
      options.port = static_cast<std::uint16_t>(port);
      options.address = address;
      options.static_dir = static_dir;
      options.trace_dir = trace_dir;
      options.stop_on_signal = true;
      SessionServer server(cfg, options);
      std::cout << "listening on ws://" << address << ':' << server.port() << '\n'
                << std::flush;
      server.run();
      return 0;
#else
      std::cerr << "built without the session server\n";
      return 2;
#endif
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
