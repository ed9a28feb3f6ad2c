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

#include "dialign/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dialign/error.hpp"
#include "dialign/rl/policy.hpp"

namespace dialign::cli {

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ValidationError("bad number '" + text + "' in " + what);
  return v;
}

std::string schema_of(const std::vector<UserConfig>& scenarios) {
  return scenarios.empty() ? std::string{"aloe"} : scenarios.front().profile.schema().name();
}

}  // namespace

EvalMode parse_mode(std::string_view text) {
  if (text == "standard") return EvalMode::Standard;
  if (text == "conflict") return EvalMode::Conflict;
  if (text == "longterm") return EvalMode::Longterm;
  throw ArgumentError("unknown mode '" + std::string(text) + "' (expected standard, conflict or longterm)");
}

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::Standard:
      return "standard";
    case EvalMode::Conflict:
      return "conflict";
    case EvalMode::Longterm:
      return "longterm";
  }
  return "standard";
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

io::Json RunConfig::to_json() const {
  io::Json paths = io::Json::array();
  for (const auto& p : scenarios) paths.push_back(p.string());
  io::Json j{{"scenarios", std::move(paths)},
             {"ppo", io::to_json(ppo)},
             {"weights", {weights.profile, weights.response}},
             {"matcher", matcher},
             {"horizon", horizon},
             {"seed", seed},
             {"out", out.string()},
             {"mode", std::string(to_string(mode))},
             {"agent", agent},
             {"greedy", greedy},
             {"eval_samples", eval_samples},
             {"conflict_turn", conflict_turn},
             {"longterm_horizon", longterm_horizon},
             {"normalization", normalization == metrics::Normalization::Global ? "global" : "running"}};
  if (checkpoint) j["checkpoint"] = checkpoint->string();
  if (resume) j["resume"] = resume->string();
  return j;
}

RunConfig run_config_from_json(const io::Json& j, const fs::path& base_dir) {
  try {
    RunConfig c;
    if (auto it = j.find("scenarios"); it != j.end()) {
      if (it->is_string()) c.scenarios.push_back(resolve(it->get<std::string>(), base_dir));
      else
        for (const auto& p : *it) c.scenarios.push_back(resolve(p.get<std::string>(), base_dir));
    }
    if (auto it = j.find("ppo"); it != j.end()) c.ppo = io::ppo_config_from_json(*it);
    if (auto it = j.find("weights"); it != j.end()) c.weights = {it->at(0).get<double>(), it->at(1).get<double>()};
    c.matcher = j.value("matcher", c.matcher);
    c.horizon = j.value("horizon", c.horizon);
    c.seed = j.value("seed", c.seed);
    if (auto it = j.find("out"); it != j.end()) c.out = resolve(it->get<std::string>(), base_dir);
    if (auto it = j.find("checkpoint"); it != j.end()) c.checkpoint = resolve(it->get<std::string>(), base_dir);
    if (auto it = j.find("resume"); it != j.end()) c.resume = resolve(it->get<std::string>(), base_dir);
    if (auto it = j.find("mode"); it != j.end()) c.mode = parse_mode(it->get<std::string>());
    c.agent = j.value("agent", c.agent);
    c.greedy = j.value("greedy", c.greedy);
    c.eval_samples = j.value("eval_samples", c.eval_samples);
    c.conflict_turn = j.value("conflict_turn", c.conflict_turn);
    c.longterm_horizon = j.value("longterm_horizon", c.longterm_horizon);
    const auto norm = j.value("normalization", std::string{"global"});
    if (norm == "running") c.normalization = metrics::Normalization::Running;
    else if (norm != "global") throw ValidationError("normalization must be global or running");
    SlotMatcher::parse(c.matcher);
    return c;
  } catch (const io::Json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(io::read_json_file(path), path.parent_path());
}

std::vector<UserConfig> load_scenarios(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw ConfigError("no scenario files given");
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw ConfigError("scenario file not found: " + p.string());
    }
  }
  if (files.empty()) throw ConfigError("no scenario files found under the given paths");
  std::vector<UserConfig> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(io::read_scenario(f));
  return out;
}

std::vector<fs::path> cmd_gen_scenarios(const ScenarioOptions& options, const fs::path& out) {
  const auto scenarios = generate_scenarios(options);
  std::vector<fs::path> written;
  for (const auto& s : scenarios) {
    written.push_back(out / (s.id + ".json"));
    io::write_scenario(written.back(), s);
  }
  return written;
}

std::vector<rl::CurveRow> read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open curve log " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<rl::CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw ValidationError("curve log " + path.string() + " has a malformed row");
    rows.push_back({static_cast<int>(parse_double(f[0], path.string())), parse_double(f[1], path.string()),
                    parse_double(f[2], path.string()), parse_double(f[3], path.string()),
                    parse_double(f[4], path.string()), parse_double(f[5], path.string())});
  }
  return rows;
}

void write_curve_csv(const fs::path& path, const std::vector<rl::CurveRow>& rows) {
  std::ostringstream os;
  os << "step,mean_total_reward,mean_profile_reward,mean_response_reward,clip_fraction,value_loss\n";
  for (const auto& r : rows)
    os << r.step << ',' << format_number(r.mean_total_reward) << ',' << format_number(r.mean_profile_reward) << ','
       << format_number(r.mean_response_reward) << ',' << format_number(r.clip_fraction) << ','
       << format_number(r.value_loss) << '\n';
  io::write_text_file(path, os.str());
}

TrainOutcome cmd_train(const RunConfig& config) {
  const auto scenarios = load_scenarios(config.scenarios);
  rl::TrainOptions options{config.ppo, config.weights, SlotMatcher::parse(config.matcher)};
  options.ppo.seed = config.seed;
  options.ppo.max_rounds = config.horizon;
  options.ppo.validate();

  TrainOutcome outcome;
  outcome.label = config.weights.label();
  outcome.fingerprint = io::fingerprint(options.ppo, config.weights, config.matcher);
  outcome.checkpoint = config.out / "checkpoint.json";
  outcome.curve = config.out / ("curve_" + outcome.label + ".csv");

  io::Checkpoint ck{{}, options.ppo, config.weights, config.matcher, schema_of(scenarios), outcome.fingerprint};
  std::vector<rl::CurveRow> rows;
  if (config.resume) {
    auto prior = io::read_checkpoint(*config.resume);
    if (prior.fingerprint != outcome.fingerprint)
      throw ValidationError("checkpoint " + config.resume->string() + " was written under a different configuration");
    ck.state = prior.state;
    if (fs::exists(outcome.curve))
      for (const auto& r : read_curve_csv(outcome.curve))
        if (r.step <= ck.state.step) rows.push_back(r);
  }

  auto on_round = [&](const rl::TrainState& state, const rl::CurveRow&) {
    if (options.ppo.checkpoint_every > 0 && state.step % options.ppo.checkpoint_every == 0) {
      io::Checkpoint snap = ck;
      snap.state = state;
      io::write_checkpoint(config.out / ("checkpoint_step" + std::to_string(state.step) + ".json"), snap);
    }
  };
  outcome.result = rl::train(options, scenarios, ck.state, on_round);
  ck.state = outcome.result.state;
  rows.insert(rows.end(), outcome.result.curve.begin(), outcome.result.curve.end());

  io::write_checkpoint(outcome.checkpoint, ck);
  write_curve_csv(outcome.curve, rows);
  auto cfg = config.to_json();
  cfg["fingerprint"] = outcome.fingerprint;
  io::write_text_file(config.out / "run_config.json", cfg.dump(2) + "\n");
  return outcome;
}

ReportBundle build_report(std::vector<EpisodeRecord> episodes, const std::string& method, bool longterm,
                          const SlotMatcher& matcher, metrics::Normalization normalization) {
  if (episodes.empty()) throw ArgumentError("no episodes to report on");
  ReportBundle b;
  b.method = method;
  b.curve = metrics::alignment_curve(episodes);
  b.summary = metrics::summarize(b.curve.values, normalization);
  b.confusion = metrics::judge_confusion(episodes);
  if (b.confusion.total() > 0) b.agreement = metrics::agreement_stats(b.confusion);
  if (longterm) {
    int horizon = static_cast<int>(episodes.front().turns.size());
    for (const auto& ep : episodes) horizon = std::min(horizon, static_cast<int>(ep.turns.size()));
    const auto checkpoints = metrics::default_checkpoints(horizon);
    LongtermReport report;
    report.points.resize(checkpoints.size());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) report.points[i].turn = checkpoints[i];
    for (const auto& ep : episodes) {
      const auto curve = metrics::longterm_profile_curve(ep, checkpoints, matcher);
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        report.points[i].profile_score += curve.points[i].profile_score;
        report.points[i].theoretical_max += curve.points[i].theoretical_max;
        report.points[i].f1_ceiling += curve.points[i].f1_ceiling;
        report.points[i].recall += curve.points[i].recall;
      }
    }
    const double n = static_cast<double>(episodes.size());
    for (auto& p : report.points) {
      p.profile_score /= n;
      p.theoretical_max /= n;
      p.f1_ceiling /= n;
      p.recall /= n;
      report.average_profile_score += p.profile_score;
    }
    report.average_profile_score /= static_cast<double>(report.points.size());
    b.longterm = std::move(report);
  }
  b.seed = episodes.front().seed;
  b.episodes = std::move(episodes);
  return b;
}

void write_report(const ReportBundle& b, const fs::path& out) {
  const auto& values = b.curve.values;
  std::ostringstream al;
  al << "method";
  for (Eigen::Index k = 1; k <= values.size(); ++k) al << ",k=" << k;
  al << ",AVG,N-IR,N-R2\n" << csv_field(b.method);
  for (Eigen::Index k = 0; k < values.size(); ++k) al << ',' << format_number(values(k));
  al << ',' << format_number(b.summary.average) << ',' << format_number(b.summary.n_ir) << ','
     << format_number(b.summary.n_r2) << '\n';
  io::write_text_file(out / "al_table.csv", al.str());

  std::ostringstream summary;
  summary << "method,instances,AVG,N-IR,N-R2,raw_R2,seed,fingerprint\n"
          << csv_field(b.method) << ',' << b.curve.instances << ',' << format_number(b.summary.average) << ','
          << format_number(b.summary.n_ir) << ',' << format_number(b.summary.n_r2) << ','
          << format_number(b.summary.raw_r2) << ',' << b.seed << ',' << b.fingerprint << '\n';
  io::write_text_file(out / "summary.csv", summary.str());

  std::ostringstream agreement;
  agreement << "tp,fp,fn,tn,accuracy,precision,recall,f1,specificity,kappa\n"
            << b.confusion.tp << ',' << b.confusion.fp << ',' << b.confusion.fn << ',' << b.confusion.tn;
  if (b.agreement) {
    const auto& a = *b.agreement;
    agreement << ',' << format_number(a.accuracy) << ',' << format_number(a.precision) << ','
              << format_number(a.recall) << ',' << format_number(a.f1) << ',' << format_number(a.specificity) << ','
              << (a.kappa ? format_number(*a.kappa) : std::string("undefined"));
  } else {
    agreement << ",,,,,,undefined";
  }
  agreement << '\n';
  io::write_text_file(out / "agreement.csv", agreement.str());

  if (b.longterm) {
    std::ostringstream lt;
    lt << "checkpoint,profile_score,theoretical_max,f1_ceiling,recall\n";
    for (const auto& p : b.longterm->points)
      lt << p.turn << ',' << format_number(100.0 * p.profile_score) << ',' << format_number(100.0 * p.theoretical_max)
         << ',' << format_number(100.0 * p.f1_ceiling) << ',' << format_number(100.0 * p.recall) << '\n';
    lt << "AVG," << format_number(100.0 * b.longterm->average_profile_score) << ",,,\n";
    io::write_text_file(out / "longterm.csv", lt.str());
  }
}

ReportBundle cmd_eval(const RunConfig& config) {
  auto scenarios = load_scenarios(config.scenarios);
  if (config.eval_samples < 1) throw ArgumentError("eval_samples must be at least 1");
  const SlotMatcher matcher = SlotMatcher::parse(config.matcher);

  std::optional<io::Checkpoint> ck;
  if (config.agent == "policy") {
    if (!config.checkpoint) throw ArgumentError("eval with the policy agent needs --checkpoint");
    ck = io::read_checkpoint(*config.checkpoint);
    for (const auto& s : scenarios)
      if (!s.profile.schema().open() && s.profile.schema().name() != ck->schema)
        throw ValidationError("scenario '" + s.id + "' uses schema '" + s.profile.schema().name() +
                              "' but the checkpoint was trained on '" + ck->schema + "'");
  } else if (config.agent != "oracle") {
    throw ArgumentError("unknown agent '" + config.agent + "' (expected policy or oracle)");
  }

  const int horizon = config.mode == EvalMode::Longterm ? config.longterm_horizon : config.horizon;
  if (config.mode == EvalMode::Conflict)
    for (auto& s : scenarios)
      if (!s.conflict) s.conflict = default_conflict(s, config.conflict_turn, config.seed);
  if (config.mode != EvalMode::Conflict)
    for (auto& s : scenarios) s.conflict.reset();
  scenarios = rl::with_horizon(std::move(scenarios), horizon);

  const EnvOptions env{matcher, config.weights, config.ppo.gamma};
  std::vector<EpisodeRecord> episodes;
  std::string method = "oracle";
  if (ck) {
    method = ck->weights.label();
    const rl::PolicyAgent agent(ck->state.policy, ck->state.value, config.greedy);
    episodes = rl::collect(agent, scenarios, env, config.eval_samples, config.seed, 0, config.ppo.workers);
  } else {
    const EvidenceTrackingAgent agent;
    episodes = rl::collect(agent, scenarios, env, config.eval_samples, config.seed, 0, config.ppo.workers);
  }

  auto bundle = build_report(std::move(episodes), method, config.mode == EvalMode::Longterm, matcher,
                             config.normalization);
  bundle.fingerprint = ck ? ck->fingerprint : io::fingerprint(config.ppo, config.weights, config.matcher);
  bundle.seed = config.seed;
  if (ck && config.checkpoint) {
    const auto curve = config.checkpoint->parent_path() / ("curve_" + ck->weights.label() + ".csv");
    if (fs::exists(curve)) bundle.training = read_curve_csv(curve);
  }

  io::write_episodes(config.out / "episodes.jsonl", bundle.episodes);
  write_report(bundle, config.out);
  auto cfg = config.to_json();
  cfg["fingerprint"] = bundle.fingerprint;
  io::write_text_file(config.out / "eval_config.json", cfg.dump(2) + "\n");
  return bundle;
}

ReportBundle cmd_report(const fs::path& episodes_path, const fs::path& out, bool longterm,
                        metrics::Normalization normalization) {
  auto episodes = io::read_episodes(episodes_path);
  std::string method = "episodes";
  if (!episodes.empty()) method = episodes.front().weights.label();
  auto bundle = build_report(std::move(episodes), method, longterm, SlotMatcher::exact(), normalization);
  write_report(bundle, out);
  return bundle;
}

void cmd_merge_curves(const std::vector<fs::path>& curves, const fs::path& out) {
  if (curves.empty()) throw ArgumentError("no curve logs given");
  std::vector<std::string> labels;
  std::map<int, std::vector<std::string>> table;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    auto label = curves[i].stem().string();
    if (label.rfind("curve_", 0) == 0) label = label.substr(6);
    labels.push_back(label);
    for (const auto& r : read_curve_csv(curves[i])) {
      auto& row = table[r.step];
      row.resize(curves.size());
      row[i] = format_number(r.mean_total_reward);
    }
  }
  std::ostringstream os;
  os << "step";
  for (const auto& l : labels) os << ',' << csv_field(l);
  os << '\n';
  for (auto& [step, row] : table) {
    row.resize(curves.size());
    os << step;
    for (const auto& v : row) os << ',' << v;
    os << '\n';
  }
  io::write_text_file(out / "reward_curves.csv", os.str());
}

BenchDistribution BenchDistribution::parse(std::string_view text) {
  if (text == "uniform") return {};
  if (text == "dup") return {Kind::Duplicates, 0, 0};
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto parts = split(text.substr(prefix.size()), ',');
    if (parts.size() == 2) {
      std::size_t a = 0, b = 0;
      const auto ra = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), a);
      const auto rb = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), b);
      if (ra.ec == std::errc{} && rb.ec == std::errc{} && ra.ptr == parts[0].data() + parts[0].size() &&
          rb.ptr == parts[1].data() + parts[1].size())
        return {Kind::Fixed, a, b};
    }
  }
  throw ArgumentError("unknown distribution '" + std::string(text) + "' (expected uniform, dup or fixed:<a>,<b>)");
}

std::vector<OverlapBenchCase> build_bench(int count, const BenchDistribution& distribution, std::uint64_t seed) {
  if (count < 1) throw ArgumentError("bench needs at least one case");
  std::vector<OverlapBenchCase> cases;
  cases.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const Profile source = generate_profile(false, 0, rng);
    const std::size_t n = source.size();
    switch (distribution.kind) {
      case BenchDistribution::Kind::Uniform: {
        const std::size_t a = uniform_index(rng, n + 1);
        const std::size_t b = uniform_index(rng, n - a + 1);
        cases.push_back(build_overlap_bench(source, a, b, rng()));
        break;
      }
      case BenchDistribution::Kind::Fixed:
        cases.push_back(build_overlap_bench(source, distribution.a, distribution.b, rng()));
        break;
      case BenchDistribution::Kind::Duplicates: {
        std::vector<std::size_t> idx(n);
        for (std::size_t k = 0; k < n; ++k) idx[k] = k;
        shuffle(std::span<std::size_t>(idx), rng);
        const std::size_t a = uniform_index(rng, n + 1);
        std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(a));
        OverlapBenchCase c{source, Profile(source.schema_ptr()), a, 0};
        for (std::size_t k = 0; k < a; ++k) {
          const auto& [slot, value] = source.entries()[idx[k]];
          c.rewritten.set(slot, value);
        }
        cases.push_back(std::move(c));
        break;
      }
    }
  }
  return cases;
}

MatcherReport cmd_judge_bench(int count, const BenchDistribution& distribution, std::uint64_t seed,
                              const std::string& matcher, const fs::path& out) {
  const auto m = SlotMatcher::parse(matcher);
  const auto report = eval_matcher(build_bench(count, distribution, seed), m);
  std::ostringstream os;
  os << "matcher,exact_acc,fuzzy_acc,mse,rmse,cases,seed\n"
     << csv_field(m.describe()) << ',' << format_number(100.0 * report.exact_acc) << ','
     << format_number(100.0 * report.fuzzy_acc) << ',' << format_number(report.mse) << ','
     << format_number(report.rmse) << ',' << report.cases << ',' << seed << '\n';
  io::write_text_file(out / "judge_bench.csv", os.str());
  return report;
}

}  // namespace dialign::cli
