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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dialign/dialogue.hpp"
#include "dialign/profile.hpp"

namespace dialign {

struct ConflictSpec {
  int turn = 6;
  std::vector<SlotValue> replace;
};

struct UserConfig {
  std::string id;
  Profile profile;
  /// Reveal count per utterance, indexed by turn - 1. Turn 1 is always the
  /// fixed opener and reveals nothing. Empty means one per turn; turns past
  /// the end reuse the last entry.
  std::vector<int> reveal_schedule;
  std::optional<ConflictSpec> conflict;
  std::uint64_t style_seed = 0;
  int horizon = 10;

  /// Throws ConfigError on a broken config.
  void validate() const;
  int reveals_at(int turn) const;
};

struct UserStyle {
  std::size_t template_offset = 0;
  bool exclaim = false;
};

struct UserState {
  int turn_index = 0;
  std::vector<std::string> revealed;     // slot names, in reveal order
  std::vector<std::string> reveal_order; // seeded permutation of profile slots
  Profile active_profile;
  UserStyle style;

  bool is_revealed(std::string_view slot) const;
};

inline constexpr std::string_view k_opener = "Hello";

/// u_1: always "Hello" with no evidence.
UserUtterance first_utterance(const UserConfig& config);
UserState initial_state(const UserConfig& config);

/// Produces u_{t+1} from the state after u_t. Returns nullopt once the
/// horizon is reached. When state.turn_index equals the conflict turn, the
/// replacement entries are swapped into the active profile and re-revealed
/// in this utterance.
std::optional<std::pair<UserUtterance, UserState>> next_utterance(const UserState& state,
                                                                  const DialogueState& history,
                                                                  const UserConfig& config);

/// |revealed ∩ slots(truth)| / |truth|; 0 for an empty truth.
double theoretical_max(const UserState& state, const Profile& truth);

/// Ground truth in force when the agent acts at the given turn.
Profile effective_truth(const UserConfig& config, int turn);

/// Stateful wrapper for one episode.
class UserSimulator {
 public:
  explicit UserSimulator(UserConfig config);

  const UserConfig& config() const { return config_; }
  const UserState& state() const { return state_; }

  UserUtterance start();
  std::optional<UserUtterance> respond(const DialogueState& history);

 private:
  UserConfig config_;
  UserState state_;
};

}  // namespace dialign
