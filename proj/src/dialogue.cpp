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

#include "dialign/dialogue.hpp"

namespace dialign {

bool DialogueState::well_formed() const {
  if (user_turns.empty() || user_turns.size() != agent_turns.size() + 1) return false;
  for (std::size_t i = 0; i < user_turns.size(); ++i)
    if (user_turns[i].turn != static_cast<int>(i) + 1) return false;
  return true;
}

bool DialogueState::any_evidence() const {
  for (const auto& u : user_turns)
    if (!u.evidence.empty()) return true;
  return false;
}

std::map<std::string, std::string> DialogueState::latest_evidence() const {
  std::map<std::string, std::string> latest;
  for (const auto& u : user_turns)
    for (const auto& [slot, value] : u.evidence) latest[slot] = value;
  return latest;
}

}  // namespace dialign
