#include <benchmark/benchmark.h>

#include "softnash/config.hpp"
#include "softnash/controller.hpp"
#include "softnash/harness.hpp"
#include "softnash/riccati.hpp"
#include "softnash/session.hpp"
#include "softnash/trial.hpp"

using namespace softnash;

namespace {

const ExperimentConfig& config() {
  static const ExperimentConfig cfg = load_config(default_config_path());
  return cfg;
}

void BM_SolveDare(benchmark::State& state) {
  const auto& t = config().trial;
  const MatrixXd Q = t.weights.state_weight(t.dynamics);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dare(t.dynamics.A, t.dynamics.B, Q, t.weights.R_r));
  }
}
BENCHMARK(BM_SolveDare);

void BM_ComputeGains(benchmark::State& state) {
  const auto& t = config().trial;
  const auto value = solve_robot_value(t.dynamics, t.weights);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gains(t.dynamics, t.weights, value, Softness(2.0)));
  }
}
BENCHMARK(BM_ComputeGains);

void BM_BestResponse(benchmark::State& state) {
  const auto& t = config().trial;
  const auto g = compute_gains(t.dynamics, t.weights, solve_robot_value(t.dynamics, t.weights),
                               Softness(2.0));
  const VectorXd x = VectorXd::LinSpaced(6, -0.01, 0.01);
  const VectorXd uh = VectorXd::Constant(3, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(best_response(g, x, uh));
}
BENCHMARK(BM_BestResponse);

void BM_SimulateTrial(benchmark::State& state) {
  TrialConfig t = config().trial;
  t.mode = Mode::nash(2.0);
  t.seed = 1;
  t.value = std::make_shared<RiccatiSolution>(solve_robot_value(t.dynamics, t.weights));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trial(t));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.steps()));
}
BENCHMARK(BM_SimulateTrial)->Unit(benchmark::kMillisecond);

void BM_DefaultSweep(benchmark::State& state) {
  ExperimentConfig cfg = config();
  cfg.parallel = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
}
BENCHMARK(BM_DefaultSweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_SessionTick(benchmark::State& state) {
  session::Session s(config());
  s.handle(R"({"type":"hello"})");
  std::uint64_t seq = 0;
  for (auto _ : state) {
    const auto reply = s.handle(R"({"type":"input","seq":)" + std::to_string(++seq) + R"(,"pointer":[0.01,-0.02]})");
    if (reply) state.SkipWithError("input rejected");
    benchmark::DoNotOptimize(s.tick());
    if (s.ended()) state.SkipWithError("session ended");
  }
}
BENCHMARK(BM_SessionTick);

}  // namespace
BENCHMARK_MAIN();
