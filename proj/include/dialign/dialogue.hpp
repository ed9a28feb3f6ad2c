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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dialign/profile.hpp"

namespace dialign {

using SlotValue = std::pair<std::string, std::string>;

struct UserUtterance {
  std::string text;
  std::vector<SlotValue> evidence;   // newly revealed (slot, value) pairs
  int turn = 0;                      // 1-based index of this utterance
  std::optional<std::string> topic;  // slot the request touches; none for the opener
};

/// Structured agent response. The judge reads these fields, never the text.
struct AgentResponse {
  std::vector<SlotValue> addressed_slots;
  std::string text;
  std::string follow_up;  // continuation element; empty when absent
};

struct AgentAction {
  AgentResponse response;
  Profile estimate_update;  // full replacement estimate for this turn
};

/// Sampled factor values of the structured policy: per-slot inclusion flags
/// (schema order), selected response slot (0 = none, i + 1 = slot i) and the
/// engagement flag.
struct FactoredChoice {
  std::vector<std::uint8_t> include;
  std::size_t selection = 0;
  bool engage = false;

  friend bool operator==(const FactoredChoice&, const FactoredChoice&) = default;
};

/// s_t = {u_1, r_1, ..., u_t}. Stored as two sequences; alternation holds
/// while user_turns.size() == agent_turns.size() + 1.
struct DialogueState {
  SchemaPtr schema;
  std::vector<UserUtterance> user_turns;
  std::vector<AgentAction> agent_turns;

  int turn_index() const { return static_cast<int>(user_turns.size()); }
  bool well_formed() const;
  const UserUtterance& latest() const { return user_turns.back(); }
  bool any_evidence() const;

  /// Most recent value the user stated for each slot.
  std::map<std::string, std::string> latest_evidence() const;
};

}  // namespace dialign
