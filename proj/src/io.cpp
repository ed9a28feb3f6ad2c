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

#include "dialign/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dialign/error.hpp"
#include "dialign/rng.hpp"

namespace dialign::io {

namespace {

Json pairs_to_json(const std::vector<SlotValue>& pairs) {
  Json arr = Json::array();
  for (const auto& [s, v] : pairs) arr.push_back(Json::array({s, v}));
  return arr;
}

std::vector<SlotValue> pairs_from_json(const Json& j) {
  std::vector<SlotValue> out;
  for (const auto& p : j) out.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  return out;
}

Profile profile_with_schema(const Json& entries, const SchemaPtr& schema) {
  Profile p(schema);
  for (const auto& [slot, value] : entries.items()) p.set(slot, value.get<std::string>());
  return p;
}

template <typename F>
auto parse_guard(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

}  // namespace

Json to_json(const Profile& profile) {
  Json entries = Json::object();
  for (const auto& [slot, value] : profile.entries()) entries[slot] = value;
  return Json{{"schema", profile.schema().name()}, {"entries", std::move(entries)}};
}

Profile profile_from_json(const Json& j) {
  return parse_guard("profile record", [&] {
    const auto name = j.at("schema").get<std::string>();
    const auto& entries = j.at("entries");
    if (!entries.is_object()) throw ValidationError("profile entries must be an object");
    if (name == SlotSchema::aloe()->name()) return profile_with_schema(entries, SlotSchema::aloe());
    std::vector<std::string> slots;
    for (const auto& [slot, value] : entries.items()) slots.push_back(slot);
    return profile_with_schema(entries, std::make_shared<const SlotSchema>(name, slots, true));
  });
}

std::vector<Profile> read_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file " + path.string());
  std::vector<Profile> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(profile_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_profiles(const std::filesystem::path& path, const std::vector<Profile>& profiles) {
  std::ostringstream os;
  for (const auto& p : profiles) os << to_json(p).dump() << '\n';
  write_text_file(path, os.str());
}

Json to_json(const UserConfig& config) {
  Json conflict = nullptr;
  if (config.conflict) {
    Json replace = Json::object();
    for (const auto& [s, v] : config.conflict->replace) replace[s] = v;
    conflict = Json{{"turn", config.conflict->turn}, {"replace", std::move(replace)}};
  }
  return Json{{"id", config.id},
              {"profile", to_json(config.profile)},
              {"reveal_schedule", config.reveal_schedule},
              {"conflict", std::move(conflict)},
              {"horizon", config.horizon},
              {"style_seed", config.style_seed}};
}

UserConfig scenario_from_json(const Json& j) {
  return parse_guard("scenario", [&] {
    UserConfig c{j.value("id", std::string{}), profile_from_json(j.at("profile")),
                 j.value("reveal_schedule", std::vector<int>{}), std::nullopt,
                 j.value("style_seed", std::uint64_t{0}), j.value("horizon", 10)};
    if (auto it = j.find("conflict"); it != j.end() && !it->is_null()) {
      ConflictSpec spec;
      spec.turn = it->value("turn", 6);
      for (const auto& [slot, value] : it->at("replace").items()) spec.replace.emplace_back(slot, value.get<std::string>());
      c.conflict = std::move(spec);
    }
    c.validate();
    return c;
  });
}

UserConfig read_scenario(const std::filesystem::path& path) {
  auto config = scenario_from_json(read_json_file(path));
  if (config.id.empty()) config.id = path.stem().string();
  return config;
}

void write_scenario(const std::filesystem::path& path, const UserConfig& config) {
  write_text_file(path, to_json(config).dump(2) + "\n");
}

Json to_json(const EpisodeRecord& episode) {
  Json turns = Json::array();
  for (const auto& t : episode.turns) {
    const auto& j = t.judgment;
    Json user{{"text", t.user.text}, {"evidence", pairs_to_json(t.user.evidence)},
              {"topic", t.user.topic ? Json(*t.user.topic) : Json(nullptr)}};
    Json action{{"addressed", pairs_to_json(t.action.response.addressed_slots)},
                {"text", t.action.response.text},
                {"follow_up", t.action.response.follow_up},
                {"estimate", to_json(t.action.estimate_update)}};
    Json judgment{{"naturalness", j.naturalness},
                  {"relevance", j.relevance},
                  {"logical_consistency", j.logical_consistency},
                  {"engagement", j.engagement},
                  {"informativeness", j.informativeness},
                  {"preference_expression", j.preference_expression},
                  {"style_consistency", j.style_consistency},
                  {"goal_alignment", j.goal_alignment},
                  {"persona_coherence", j.persona_coherence}};
    Json choice{{"include", t.choice.include}, {"selection", t.choice.selection}, {"engage", t.choice.engage}};
    turns.push_back(Json{{"turn", t.turn},
                         {"user", std::move(user)},
                         {"action", std::move(action)},
                         {"judgment", std::move(judgment)},
                         {"reward",
                          {{"profile", t.reward.profile},
                           {"response", t.reward.response},
                           {"total", t.reward.total},
                           {"weighted", t.weighted}}},
                         {"aligned", t.aligned},
                         {"theoretical_max", t.theoretical_max},
                         {"truth", to_json(t.truth)},
                         {"choice", std::move(choice)},
                         {"log_prob", t.log_prob},
                         {"value", t.value}});
  }
  return Json{{"schema_version", k_episode_schema_version},
              {"scenario_id", episode.scenario_id},
              {"seed", episode.seed},
              {"gamma", episode.gamma},
              {"weights", {episode.weights.profile, episode.weights.response}},
              {"horizon", episode.horizon},
              {"turns", std::move(turns)}};
}

EpisodeRecord episode_from_json(const Json& j) {
  return parse_guard("episode record", [&] {
    const int version = j.at("schema_version").get<int>();
    if (version != k_episode_schema_version)
      throw ValidationError("unsupported episode schema version " + std::to_string(version));
    EpisodeRecord ep;
    ep.scenario_id = j.at("scenario_id").get<std::string>();
    ep.seed = j.at("seed").get<std::uint64_t>();
    ep.gamma = j.at("gamma").get<double>();
    ep.weights = {j.at("weights").at(0).get<double>(), j.at("weights").at(1).get<double>()};
    ep.horizon = j.at("horizon").get<int>();
    for (const auto& jt : j.at("turns")) {
      TurnRecord t;
      t.turn = jt.at("turn").get<int>();
      const auto& u = jt.at("user");
      t.user.text = u.at("text").get<std::string>();
      t.user.evidence = pairs_from_json(u.at("evidence"));
      t.user.turn = t.turn;
      if (!u.at("topic").is_null()) t.user.topic = u.at("topic").get<std::string>();
      t.truth = profile_from_json(jt.at("truth"));
      const auto& a = jt.at("action");
      t.action.response.addressed_slots = pairs_from_json(a.at("addressed"));
      t.action.response.text = a.at("text").get<std::string>();
      t.action.response.follow_up = a.at("follow_up").get<std::string>();
      // The estimate shares the truth's schema so offline rewards can be recomputed.
      t.action.estimate_update = profile_with_schema(a.at("estimate").at("entries"), t.truth.schema_ptr());
      const auto& jj = jt.at("judgment");
      t.judgment.naturalness = jj.at("naturalness").get<std::uint8_t>();
      t.judgment.relevance = jj.at("relevance").get<std::uint8_t>();
      t.judgment.logical_consistency = jj.at("logical_consistency").get<std::uint8_t>();
      t.judgment.engagement = jj.at("engagement").get<std::uint8_t>();
      t.judgment.informativeness = jj.at("informativeness").get<std::uint8_t>();
      t.judgment.preference_expression = jj.at("preference_expression").get<double>();
      t.judgment.style_consistency = jj.at("style_consistency").get<double>();
      t.judgment.goal_alignment = jj.at("goal_alignment").get<double>();
      t.judgment.persona_coherence = jj.at("persona_coherence").get<double>();
      const auto& r = jt.at("reward");
      t.reward = {r.at("profile").get<double>(), r.at("response").get<double>(), r.at("total").get<double>()};
      t.weighted = r.at("weighted").get<double>();
      t.aligned = jt.at("aligned").get<bool>();
      t.theoretical_max = jt.at("theoretical_max").get<double>();
      const auto& c = jt.at("choice");
      t.choice.include = c.at("include").get<std::vector<std::uint8_t>>();
      t.choice.selection = c.at("selection").get<std::size_t>();
      t.choice.engage = c.at("engage").get<bool>();
      t.log_prob = jt.at("log_prob").get<double>();
      t.value = jt.at("value").get<double>();
      ep.turns.push_back(std::move(t));
    }
    return ep;
  });
}

void write_episodes(const std::filesystem::path& path, const std::vector<EpisodeRecord>& episodes) {
  std::ostringstream os;
  for (const auto& ep : episodes) os << to_json(ep).dump() << '\n';
  write_text_file(path, os.str());
}

std::vector<EpisodeRecord> read_episodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open episode log " + path.string());
  std::vector<EpisodeRecord> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(episode_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Json to_json(const rl::PPOConfig& cfg) {
  return Json{{"clip_epsilon", cfg.clip_epsilon},
              {"gamma", cfg.gamma},
              {"lambda", cfg.lambda},
              {"actor_lr", cfg.actor_lr},
              {"critic_lr", cfg.critic_lr},
              {"samples_per_scenario", cfg.samples_per_scenario},
              {"max_rounds", cfg.max_rounds},
              {"epochs", cfg.epochs},
              {"iterations", cfg.iterations},
              {"max_log_ratio", cfg.max_log_ratio},
              {"checkpoint_every", cfg.checkpoint_every},
              {"seed", cfg.seed}};
}

rl::PPOConfig ppo_config_from_json(const Json& j, rl::PPOConfig base) {
  return parse_guard("PPO config", [&] {
    base.clip_epsilon = j.value("clip_epsilon", base.clip_epsilon);
    base.gamma = j.value("gamma", base.gamma);
    base.lambda = j.value("lambda", base.lambda);
    base.actor_lr = j.value("actor_lr", base.actor_lr);
    base.critic_lr = j.value("critic_lr", base.critic_lr);
    base.samples_per_scenario = j.value("samples_per_scenario", base.samples_per_scenario);
    base.max_rounds = j.value("max_rounds", base.max_rounds);
    base.epochs = j.value("epochs", base.epochs);
    base.iterations = j.value("iterations", base.iterations);
    base.max_log_ratio = j.value("max_log_ratio", base.max_log_ratio);
    base.workers = j.value("workers", base.workers);
    base.checkpoint_every = j.value("checkpoint_every", base.checkpoint_every);
    base.seed = j.value("seed", base.seed);
    base.validate();
    return base;
  });
}

std::string fingerprint(const rl::PPOConfig& ppo, const RewardWeights& weights, const std::string& matcher) {
  Json j = to_json(ppo);
  j.erase("iterations");  // resuming with a longer budget keeps the same run identity
  j.erase("checkpoint_every");
  j["weights"] = {weights.profile, weights.response};
  j["matcher"] = matcher;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto& theta = ck.state.policy.parameters();
  const auto& phi = ck.state.value.parameters();
  Json j{{"format", "dialign-checkpoint"},
         {"version", k_checkpoint_version},
         {"step", ck.state.step},
         {"updates", ck.state.updates},
         {"label", ck.weights.label()},
         {"policy", std::vector<double>(theta.data(), theta.data() + theta.size())},
         {"value", std::vector<double>(phi.data(), phi.data() + phi.size())},
         {"ppo", to_json(ck.ppo)},
         {"weights", {ck.weights.profile, ck.weights.response}},
         {"matcher", ck.matcher},
         {"schema", ck.schema},
         {"fingerprint", fingerprint(ck.ppo, ck.weights, ck.matcher)}};
  write_text_file(path, j.dump(2) + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  return parse_guard("checkpoint " + path.string(), [&] {
    if (j.at("format").get<std::string>() != "dialign-checkpoint" ||
        j.at("version").get<int>() != k_checkpoint_version)
      throw ValidationError(path.string() + " is not a version-1 checkpoint");
    Checkpoint ck;
    const auto theta = j.at("policy").get<std::vector<double>>();
    const auto phi = j.at("value").get<std::vector<double>>();
    ck.state.policy = rl::Policy(Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size())));
    ck.state.value = rl::ValueFunction(Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size())));
    ck.state.step = j.at("step").get<int>();
    ck.state.updates = j.at("updates").get<std::int64_t>();
    ck.ppo = ppo_config_from_json(j.at("ppo"));
    ck.weights = {j.at("weights").at(0).get<double>(), j.at("weights").at(1).get<double>()};
    ck.matcher = j.at("matcher").get<std::string>();
    ck.schema = j.value("schema", std::string{"aloe"});
    ck.fingerprint = j.at("fingerprint").get<std::string>();
    if (ck.fingerprint != fingerprint(ck.ppo, ck.weights, ck.matcher))
      throw ValidationError(path.string() + ": config fingerprint does not match its contents");
    return ck;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace dialign::io
