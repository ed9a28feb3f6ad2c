// Copyright 2026 The dialign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dialign/cli.hpp"
#include "dialign/error.hpp"

namespace {

using namespace dialign;

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

RewardWeights parse_weights(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ArgumentError("--weights expects <wp,wr>");
  try {
    std::size_t used_p = 0, used_r = 0;
    const std::string p = text.substr(0, comma), r = text.substr(comma + 1);
    RewardWeights w{std::stod(p, &used_p), std::stod(r, &used_r)};
    if (used_p != p.size() || used_r != r.size()) throw std::invalid_argument(text);
    if (w.profile < 0 || w.response < 0) throw ArgumentError("reward weights must be non-negative");
    return w;
  } catch (const std::logic_error&) {
    throw ArgumentError("--weights expects two numbers, got '" + text + "'");
  }
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string weights;
  std::string mode;
  std::optional<int> horizon;
  std::string matcher;
  std::vector<std::string> scenarios;
  std::string checkpoint;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config, "Run config (JSON)");
    cmd.add_option("--seed", seed, "Random seed");
    cmd.add_option("--out", out, "Output directory");
    cmd.add_option("--weights", weights, "Reward weights <wp,wr>");
    cmd.add_option("--horizon", horizon, "Dialogue turns per episode");
    cmd.add_option("--matcher", matcher, "Slot matcher: exact or token:<thr>");
    cmd.add_option("--scenarios", scenarios, "Scenario files or directories");
  }

  cli::RunConfig resolve() const {
    cli::RunConfig c = config.empty() ? cli::RunConfig{} : cli::load_run_config(config);
    if (seed) c.seed = *seed;
    if (!out.empty()) c.out = out;
    if (!weights.empty()) c.weights = parse_weights(weights);
    if (!mode.empty()) c.mode = cli::parse_mode(mode);
    if (horizon) c.horizon = *horizon;
    if (!matcher.empty()) {
      SlotMatcher::parse(matcher);
      c.matcher = matcher;
    }
    if (!scenarios.empty()) c.scenarios.assign(scenarios.begin(), scenarios.end());
    if (!checkpoint.empty()) c.checkpoint = checkpoint;
    return c;
  }
};

void print_summary(const cli::ReportBundle& b) {
  std::printf("%s: AVG %.2f  N-IR %.4f  N-R2 %.4f  (%zu instances)\n", b.method.c_str(), b.summary.average,
              b.summary.n_ir, b.summary.n_r2, b.curve.instances);
  if (b.longterm)
    for (const auto& p : b.longterm->points)
      std::printf("  k=%-3d profile %.2f  theoretical max %.2f\n", p.turn, 100 * p.profile_score,
                  100 * p.theoretical_max);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized dialogue alignment with RL on a simulated user"};
  app.require_subcommand(1);

  ScenarioOptions gen;
  std::string gen_out = "scenarios";
  std::optional<std::uint64_t> gen_seed;
  auto* gen_cmd = app.add_subcommand("gen-scenarios", "Write seeded synthetic scenario files");
  gen_cmd->add_option("--count", gen.count, "Number of scenarios")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen_cmd->add_option("--horizon", gen.horizon, "Dialogue turns")->capture_default_str();
  gen_cmd->add_flag("--open-schema", gen.open_schema, "Draw slot names from the open pools");
  gen_cmd->add_flag("--conflict", gen.with_conflict, "Attach the default preference swap");
  gen_cmd->add_option("--conflict-turn", gen.conflict_turn, "Turn of the swap")->capture_default_str();

  CommonFlags train_flags;
  std::string resume;
  std::optional<int> iterations;
  auto* train_cmd = app.add_subcommand("train", "Train the policy with PPO");
  train_flags.add_to(*train_cmd);
  train_cmd->add_option("--resume", resume, "Continue from a checkpoint");
  train_cmd->add_option("--iterations", iterations, "Collection rounds");

  CommonFlags eval_flags;
  std::string agent;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint or the oracle");
  eval_flags.add_to(*eval_cmd);
  eval_cmd->add_option("--mode", eval_flags.mode, "standard, conflict or longterm");
  eval_cmd->add_option("--checkpoint", eval_flags.checkpoint, "Checkpoint to evaluate");
  eval_cmd->add_option("--agent", agent, "policy or oracle");

  int bench_count = 300;
  std::string bench_dist = "uniform";
  std::uint64_t bench_seed = 0;
  std::string bench_matcher = "exact";
  std::string bench_out = ".";
  auto* bench_cmd = app.add_subcommand("judge-bench", "Score a slot matcher on the overlap-count benchmark");
  bench_cmd->add_option("--count", bench_count, "Number of cases")->capture_default_str();
  bench_cmd->add_option("--distribution", bench_dist, "uniform, dup or fixed:<a>,<b>")->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
  bench_cmd->add_option("--matcher", bench_matcher, "exact or token:<thr>")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Output directory")->capture_default_str();

  std::string report_episodes;
  std::vector<std::string> report_curves;
  std::string report_out = ".";
  std::string report_mode = "standard";
  auto* report_cmd = app.add_subcommand("report", "Rebuild CSV reports from episode logs or merge curve logs");
  report_cmd->add_option("--episodes", report_episodes, "Episode log (JSONL)");
  report_cmd->add_option("--curves", report_curves, "curve_<label>.csv files to merge");
  report_cmd->add_option("--mode", report_mode, "standard or longterm")->capture_default_str();
  report_cmd->add_option("--out", report_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) {
      if (gen_seed) gen.seed = *gen_seed;
      const auto files = cli::cmd_gen_scenarios(gen, gen_out);
      std::printf("wrote %zu scenarios to %s\n", files.size(), gen_out.c_str());
    } else if (*train_cmd) {
      auto config = train_flags.resolve();
      if (!resume.empty()) config.resume = resume;
      if (iterations) config.ppo.iterations = *iterations;
      const auto outcome = cli::cmd_train(config);
      const auto& curve = outcome.result.curve;
      if (!curve.empty())
        std::printf("%s: step %d  mean reward %.4f -> %.4f\n", outcome.label.c_str(), curve.back().step,
                    curve.front().mean_total_reward, curve.back().mean_total_reward);
      std::printf("checkpoint %s\n", outcome.checkpoint.string().c_str());
    } else if (*eval_cmd) {
      auto config = eval_flags.resolve();
      if (!agent.empty()) config.agent = agent;
      print_summary(cli::cmd_eval(config));
    } else if (*bench_cmd) {
      const auto r = cli::cmd_judge_bench(bench_count, cli::BenchDistribution::parse(bench_dist), bench_seed,
                                          bench_matcher, bench_out);
      std::printf("exact %.1f  fuzzy %.1f  MSE %.4f  RMSE %.4f\n", 100 * r.exact_acc, 100 * r.fuzzy_acc, r.mse,
                  r.rmse);
    } else if (*report_cmd) {
      if (report_episodes.empty() && report_curves.empty()) throw ArgumentError("report needs --episodes or --curves");
      if (!report_curves.empty())
        cli::cmd_merge_curves({report_curves.begin(), report_curves.end()}, report_out);
      if (!report_episodes.empty())
        print_summary(cli::cmd_report(report_episodes, report_out, cli::parse_mode(report_mode) == cli::EvalMode::Longterm));
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
