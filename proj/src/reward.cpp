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

#include "dialign/reward.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "dialign/error.hpp"

namespace dialign {

int response_reward(const ResponseJudgment& j) {
  int r = 1;
  for (auto c : j.criteria()) r *= c;
  return r;
}

ResponseJudgment ResponseJudge::operator()(const AgentAction& action, const DialogueState& state,
                                           const Profile& estimate) const {
  if (!state.well_formed()) throw ValidationError("judge received a malformed dialogue state");
  const auto& addressed = action.response.addressed_slots;
  if (action.response.text.empty()) throw ValidationError("agent response has no surface text");
  std::set<std::string> seen;
  for (const auto& [slot, value] : addressed) {
    if (normalize_text(slot).empty() || normalize_text(value).empty())
      throw ValidationError("agent response addresses an empty slot or value");
    if (!seen.insert(normalize_text(slot)).second)
      throw ValidationError("agent response addresses slot '" + slot + "' twice");
  }

  ResponseJudgment j;
  j.naturalness = 1;

  const auto& topic = state.latest().topic;
  const bool on_topic =
      topic ? std::any_of(addressed.begin(), addressed.end(),
                          [&](const SlotValue& sv) { return normalize_text(sv.first) == normalize_text(*topic); })
            : addressed.empty();
  std::size_t consistent = 0;
  for (const auto& [slot, value] : addressed) {
    const std::string* believed = estimate.find(slot);
    consistent += believed && matcher_(slot, value, *believed);
  }
  const bool preference_consistent = consistent == addressed.size();
  j.relevance = on_topic && preference_consistent;

  // agent_turns[i] answered user_turns[i]; later utterances may justify a change.
  std::size_t coherent = 0;
  for (const auto& [slot, value] : addressed) {
    bool contradiction = false;
    for (std::size_t i = 0; i < state.agent_turns.size() && !contradiction; ++i) {
      for (const auto& [prev_slot, prev_value] : state.agent_turns[i].response.addressed_slots) {
        if (normalize_text(prev_slot) != normalize_text(slot) || matcher_(slot, prev_value, value)) continue;
        bool justified = false;
        for (std::size_t u = i + 1; u < state.user_turns.size() && !justified; ++u)
          for (const auto& [ev_slot, ev_value] : state.user_turns[u].evidence)
            justified |= normalize_text(ev_slot) == normalize_text(slot) && matcher_(slot, ev_value, value);
        contradiction |= !justified;
      }
    }
    coherent += !contradiction;
  }
  j.logical_consistency = coherent == addressed.size();
  j.engagement = !action.response.follow_up.empty();
  j.informativeness = !state.any_evidence() || !addressed.empty();

  const auto n = static_cast<double>(addressed.size());
  j.preference_expression = addressed.empty() ? (state.any_evidence() ? 0.0 : 1.0) : consistent / n;
  std::size_t same_style = 1;
  for (const auto& prev : state.agent_turns)
    same_style += prev.response.follow_up.empty() == action.response.follow_up.empty();
  j.style_consistency = static_cast<double>(same_style) / static_cast<double>(state.agent_turns.size() + 1);
  j.goal_alignment = on_topic ? 1.0 : 0.0;
  j.persona_coherence = addressed.empty() ? 1.0 : coherent / n;
  return j;
}

std::string RewardWeights::label() const {
  if (profile > 0 && response > 0 && profile == response) return "PRR";
  if (profile > 0 && response == 0) return "PR";
  if (profile == 0 && response > 0) return "RR";
  return "custom";
}

double combined_reward(double profile_r, double response_r, const RewardWeights& weights) {
  if (weights.profile < 0 || weights.response < 0) throw ArgumentError("reward weights must be non-negative");
  return weights.profile * profile_r + weights.response * response_r;
}

}  // namespace dialign
