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

#include "dialign/env.hpp"

#include <cmath>

#include "dialign/error.hpp"

namespace dialign {

DialogueEnv::DialogueEnv(UserConfig config, EnvOptions options)
    : sim_((config.validate(), std::move(config))), options_(std::move(options)), judge_(options_.matcher) {
  if (!(options_.gamma >= 0.0 && options_.gamma <= 1.0)) throw ConfigError("discount factor must lie in [0,1]");
  if (options_.weights.profile < 0 || options_.weights.response < 0)
    throw ConfigError("reward weights must be non-negative");
}

const DialogueState& DialogueEnv::reset() {
  state_ = DialogueState{sim_.config().profile.schema_ptr(), {sim_.start()}, {}};
  started_ = true;
  done_ = false;
  return state_;
}

StepResult DialogueEnv::step(const AgentAction& action) {
  if (!started_) throw ProtocolError("step called before reset");
  if (done_) throw ProtocolError("step called after the episode finished");

  const int t = state_.turn_index();
  const Profile truth = effective_truth(sim_.config(), t);

  StepResult out;
  out.judgment = judge_(action, state_, action.estimate_update);
  out.reward.profile = profile_reward(action.estimate_update, truth, options_.matcher);
  out.reward.response = response_reward(out.judgment);
  out.reward.total = out.reward.profile + out.reward.response;
  out.weighted = combined_reward(out.reward.profile, out.reward.response, options_.weights);
  out.theoretical_max = theoretical_max(sim_.state(), truth);
  out.aligned = out.reward.response == 1.0;
  for (const auto& [slot, value] : action.response.addressed_slots) {
    const std::string* expected = truth.find(slot);
    out.aligned = out.aligned && expected && options_.matcher(slot, value, *expected);
  }

  state_.agent_turns.push_back(action);
  if (auto reply = sim_.respond(state_)) {
    state_.user_turns.push_back(std::move(*reply));
  } else {
    done_ = true;
  }
  out.done = done_;
  return out;
}

Eigen::VectorXd observe(const DialogueState& state, int horizon) {
  const auto& slots = state.schema->slots();
  const auto s = static_cast<Eigen::Index>(slots.size());
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(2 * s + 2);
  const auto evidence = state.latest_evidence();
  for (const auto& [slot, value] : evidence)
    if (auto i = state.schema->index_of(slot)) obs(static_cast<Eigen::Index>(*i)) = 1.0;
  if (const auto& topic = state.latest().topic) {
    if (auto i = state.schema->index_of(*topic)) obs(s + static_cast<Eigen::Index>(*i)) = 1.0;
    obs(2 * s) = 1.0;
  }
  obs(2 * s + 1) = static_cast<double>(state.turn_index()) / std::max(horizon, 1);
  return obs;
}

AgentAction realize(const DialogueState& state, const FactoredChoice& choice) {
  const auto& slots = state.schema->slots();
  if (choice.include.size() != slots.size())
    throw ValidationError("choice has " + std::to_string(choice.include.size()) + " inclusion flags for " +
                          std::to_string(slots.size()) + " slots");
  if (choice.selection > slots.size()) throw ValidationError("response slot selection out of range");

  std::map<std::string, std::string> evidence;
  for (const auto& [slot, value] : state.latest_evidence()) evidence[normalize_text(slot)] = value;
  auto known = [&](const std::string& slot) -> const std::string* {
    auto it = evidence.find(normalize_text(slot));
    return it == evidence.end() ? nullptr : &it->second;
  };

  AgentAction action{{}, Profile(state.schema)};
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (choice.include[i])
      if (const auto* v = known(slots[i])) action.estimate_update.set(slots[i], *v);

  if (choice.selection > 0) {
    const auto& slot = slots[choice.selection - 1];
    const auto* v = known(slot);
    if (!v) throw ValidationError("response addresses slot '" + slot + "' without any evidence for it");
    action.response.addressed_slots.emplace_back(slot, *v);
    action.response.text = "Since your " + normalize_text(slot) + " is " + *v + ", here is an idea that suits you.";
  } else {
    action.response.text = "Nice to chat with you.";
  }
  if (choice.engage) {
    action.response.follow_up = "What else would you like me to know?";
    action.response.text += " " + action.response.follow_up;
  }
  return action;
}

AgentStep EvidenceTrackingAgent::act(const DialogueState& state, int horizon, Rng& rng) const {
  static_cast<void>(rng);
  const auto& slots = state.schema->slots();
  const auto evidence = state.latest_evidence();
  FactoredChoice choice{std::vector<std::uint8_t>(slots.size(), 0), 0, true};
  for (const auto& [slot, value] : evidence)
    if (auto i = state.schema->index_of(slot)) choice.include[*i] = 1;

  const auto& topic = state.latest().topic;
  if (topic) {
    if (auto i = state.schema->index_of(*topic); i && choice.include[*i]) choice.selection = *i + 1;
  }
  if (choice.selection == 0 && state.any_evidence()) {
    // Topic unknown: talk about the most recently stated slot.
    for (auto u = state.user_turns.rbegin(); u != state.user_turns.rend() && choice.selection == 0; ++u)
      if (!u->evidence.empty())
        if (auto i = state.schema->index_of(u->evidence.back().first)) choice.selection = *i + 1;
  }
  return AgentStep{realize(state, choice), observe(state, horizon), choice, 0.0, 0.0};
}

double EpisodeRecord::discounted_return() const {
  double ret = 0.0, discount = 1.0;
  for (const auto& t : turns) {
    ret += discount * t.weighted;
    discount *= gamma;
  }
  return ret;
}

double EpisodeRecord::total_reward() const {
  double sum = 0.0;
  for (const auto& t : turns) sum += t.reward.total;
  return sum;
}

EpisodeRecord rollout(const Agent& agent, const UserConfig& config, const EnvOptions& options, std::uint64_t seed) {
  DialogueEnv env(config, options);
  Rng rng(seed);
  EpisodeRecord record{config.id, seed, options.gamma, options.weights, config.horizon, {}};
  record.turns.reserve(static_cast<std::size_t>(config.horizon));
  env.reset();
  while (!env.done()) {
    const int t = env.state().turn_index();
    AgentStep step = agent.act(env.state(), config.horizon, rng);
    TurnRecord turn{t, env.state().latest(), step.action, {}, {}, 0.0, false, 0.0, effective_truth(config, t),
                    std::move(step.observation), std::move(step.choice), step.log_prob, step.value};
    const StepResult result = env.step(step.action);
    turn.judgment = result.judgment;
    turn.reward = result.reward;
    turn.weighted = result.weighted;
    turn.aligned = result.aligned;
    turn.theoretical_max = result.theoretical_max;
    record.turns.push_back(std::move(turn));
  }
  return record;
}

}  // namespace dialign
