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

#include <array>
#include <cstdint>
#include <string>

#include "dialign/dialogue.hpp"
#include "dialign/profile.hpp"

namespace dialign {

/// Five binary quality criteria plus four diagnostic alignment dimensions.
struct ResponseJudgment {
  std::uint8_t naturalness = 0;
  std::uint8_t relevance = 0;
  std::uint8_t logical_consistency = 0;
  std::uint8_t engagement = 0;
  std::uint8_t informativeness = 0;

  // Diagnostics only; they never enter the reward.
  double preference_expression = 0.0;
  double style_consistency = 0.0;
  double goal_alignment = 0.0;
  double persona_coherence = 0.0;

  std::array<std::uint8_t, 5> criteria() const {
    return {naturalness, relevance, logical_consistency, engagement, informativeness};
  }
};

/// N * R * L * G * F.
int response_reward(const ResponseJudgment& j);

/// Deterministic rule judge over structured responses.
///
///  - naturalness: 1 for every well-formed record (templated rendering).
///  - relevance: the response addresses the latest utterance's topic slot
///    (or addresses nothing when the utterance has no topic), and every
///    addressed value agrees with the agent's own estimate.
///  - logical consistency: no addressed value contradicts an earlier agent
///    response, unless the user has since stated the new value.
///  - engagement: the response carries a follow-up.
///  - informativeness: at least one slot is addressed once any evidence exists.
class ResponseJudge {
 public:
  ResponseJudge() = default;
  explicit ResponseJudge(SlotMatcher matcher) : matcher_(std::move(matcher)) {}

  /// state is s_t (ending in u_t, without the current action). Throws
  /// ValidationError for malformed action records.
  ResponseJudgment operator()(const AgentAction& action, const DialogueState& state, const Profile& estimate) const;

 private:
  SlotMatcher matcher_ = SlotMatcher::exact();
};

struct RewardWeights {
  double profile = 1.0;
  double response = 1.0;

  /// "PRR", "PR", "RR" or "custom".
  std::string label() const;
};

/// w_p * profile_r + w_r * response_r. Throws ArgumentError on negative weights.
double combined_reward(double profile_r, double response_r, const RewardWeights& weights);

}  // namespace dialign
