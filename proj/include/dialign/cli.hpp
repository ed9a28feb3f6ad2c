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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dialign/env.hpp"
#include "dialign/io.hpp"
#include "dialign/metrics.hpp"
#include "dialign/rl/trainer.hpp"
#include "dialign/scenario.hpp"

namespace dialign::cli {

namespace fs = std::filesystem;

enum class EvalMode { Standard, Conflict, Longterm };
EvalMode parse_mode(std::string_view text);
std::string_view to_string(EvalMode mode);

/// Everything a train or eval run needs. Relative paths in a config file
/// resolve against the file's directory.
struct RunConfig {
  std::vector<fs::path> scenarios;  // files or directories of *.json
  rl::PPOConfig ppo;
  RewardWeights weights;
  std::string matcher = "exact";
  int horizon = 10;
  std::uint64_t seed = 0;
  fs::path out = "out";

  std::optional<fs::path> checkpoint;  // eval: policy to load
  std::optional<fs::path> resume;      // train: continue from this checkpoint
  EvalMode mode = EvalMode::Standard;
  std::string agent = "policy";        // "policy" or "oracle"
  bool greedy = true;
  int eval_samples = 1;
  int conflict_turn = 6;
  int longterm_horizon = 70;
  metrics::Normalization normalization = metrics::Normalization::Global;

  io::Json to_json() const;
};

RunConfig run_config_from_json(const io::Json& j, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

/// Scenario files named on the config, directories expanded in sorted order.
/// Throws ConfigError naming the first missing path.
std::vector<UserConfig> load_scenarios(const std::vector<fs::path>& paths);

/// Writes out/scenario_NNN.json for each generated scenario.
std::vector<fs::path> cmd_gen_scenarios(const ScenarioOptions& options, const fs::path& out);

struct TrainOutcome {
  rl::TrainResult result;
  fs::path checkpoint;
  fs::path curve;
  std::string label;
  std::string fingerprint;
};

/// Trains and writes checkpoint.json, curve_<label>.csv and run_config.json
/// under config.out. A resumed run keeps the curve rows up to the
/// checkpoint's step and appends the new ones.
TrainOutcome cmd_train(const RunConfig& config);

struct LongtermReport {
  std::vector<metrics::LongtermPoint> points;  // averaged over episodes
  double average_profile_score = 0.0;
};

struct ReportBundle {
  std::string method;
  metrics::AlignmentCurve curve;
  metrics::CurveSummary summary;
  metrics::ConfusionMatrix confusion;
  std::optional<metrics::AgreementStats> agreement;
  std::optional<LongtermReport> longterm;
  std::vector<rl::CurveRow> training;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
};

/// Reports derived from logged episodes only.
ReportBundle build_report(std::vector<EpisodeRecord> episodes, const std::string& method, bool longterm,
                          const SlotMatcher& matcher, metrics::Normalization normalization);

/// al_table.csv, summary.csv, agreement.csv and, when present, longterm.csv.
void write_report(const ReportBundle& bundle, const fs::path& out);

/// Runs the policy (or the oracle) on every scenario and writes episodes.jsonl
/// plus the reports.
ReportBundle cmd_eval(const RunConfig& config);

/// Rebuilds reports from an episode log.
ReportBundle cmd_report(const fs::path& episodes, const fs::path& out, bool longterm,
                        metrics::Normalization normalization = metrics::Normalization::Global);

/// Merges curve_<label>.csv files into one table keyed by step.
void cmd_merge_curves(const std::vector<fs::path>& curves, const fs::path& out);

/// "uniform" (a + b <= slots, both uniform), "fixed:<a>,<b>", or "dup"
/// (unparaphrased copies, b = 0).
struct BenchDistribution {
  enum class Kind { Uniform, Fixed, Duplicates } kind = Kind::Uniform;
  std::size_t a = 0;
  std::size_t b = 0;
  static BenchDistribution parse(std::string_view text);
};

std::vector<OverlapBenchCase> build_bench(int count, const BenchDistribution& distribution, std::uint64_t seed);

/// Writes judge_bench.csv (matcher, exact_acc, fuzzy_acc, mse, rmse).
MatcherReport cmd_judge_bench(int count, const BenchDistribution& distribution, std::uint64_t seed,
                              const std::string& matcher, const fs::path& out);

std::vector<rl::CurveRow> read_curve_csv(const fs::path& path);
void write_curve_csv(const fs::path& path, const std::vector<rl::CurveRow>& rows);

/// Shortest round-trip text for a double.
std::string format_number(double value);

}  // namespace dialign::cli
