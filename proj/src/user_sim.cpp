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

#include "dialign/user_sim.hpp"

#include <algorithm>
#include <cctype>

#include "dialign/data.hpp"
#include "dialign/error.hpp"
#include "dialign/rng.hpp"

namespace dialign {

namespace {

// Stream tags for derive_seed, so each random choice has its own stream.
enum Stream : std::uint64_t { kOrder = 1, kStyle, kTopic, kTemplate, kChitChat };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string render(std::string tpl, const std::string& slot, const std::string& value) {
  for (auto [key, repl] : {std::pair<std::string_view, std::string>{"{value}", value},
                           std::pair<std::string_view, std::string>{"{slot}", lower(slot)}}) {
    for (auto pos = tpl.find(key); pos != std::string::npos; pos = tpl.find(key, pos + repl.size()))
      tpl.replace(pos, key.size(), repl);
  }
  return tpl;
}

std::string pick(const nlohmann::ordered_json& bank, std::size_t offset, std::uint64_t seed) {
  Rng rng(seed);
  return bank.at((offset + uniform_index(rng, bank.size())) % bank.size()).get<std::string>();
}

std::string reveal_sentence(const UserState& st, const UserConfig& cfg, int turn, const SlotValue& ev, bool changed) {
  const auto& t = data::templates();
  const auto seed = derive_seed(cfg.style_seed, kTemplate, turn, fnv1a(ev.first));
  if (changed) return render(pick(t.at("change"), st.style.template_offset, seed), ev.first, ev.second);
  const auto& bank = t.at("reveal");
  if (auto it = bank.find(ev.first); it != bank.end())
    return render(pick(*it, st.style.template_offset, seed), ev.first, ev.second);
  return render(pick(t.at("reveal_generic"), st.style.template_offset, seed), ev.first, ev.second);
}

}  // namespace

void UserConfig::validate() const {
  if (horizon < 1) throw ConfigError("scenario '" + id + "': horizon must be at least 1");
  if (profile.empty()) throw ConfigError("scenario '" + id + "': profile is empty");
  long long total = 0;
  for (int c : reveal_schedule) {
    if (c < 0) throw ConfigError("scenario '" + id + "': negative reveal count");
    total += c;
  }
  if (total > static_cast<long long>(profile.size()) * horizon)
    throw ConfigError("scenario '" + id + "': reveal schedule exceeds |profile| x horizon");
  if (conflict) {
    if (conflict->turn < 1 || conflict->turn > horizon)
      throw ConfigError("scenario '" + id + "': conflict turn outside [1, horizon]");
    if (conflict->replace.empty()) throw ConfigError("scenario '" + id + "': conflict replaces nothing");
    Profile probe(profile.schema_ptr());
    for (const auto& [slot, value] : conflict->replace) probe.set(slot, value);
  }
}

int UserConfig::reveals_at(int turn) const {
  if (turn <= 1) return 0;
  if (reveal_schedule.empty()) return 1;
  const auto idx = static_cast<std::size_t>(turn - 1);
  return idx < reveal_schedule.size() ? reveal_schedule[idx] : reveal_schedule.back();
}

bool UserState::is_revealed(std::string_view slot) const {
  const auto key = normalize_text(slot);
  return std::any_of(revealed.begin(), revealed.end(), [&](const auto& s) { return normalize_text(s) == key; });
}

UserUtterance first_utterance(const UserConfig& config) {
  static_cast<void>(config);
  return UserUtterance{std::string(k_opener), {}, 1, std::nullopt};
}

UserState initial_state(const UserConfig& config) {
  config.validate();
  UserState st{1, {}, {}, config.profile, {}};
  for (const auto& [slot, value] : config.profile.entries()) st.reveal_order.push_back(slot);
  // Schema order first, then the seeded shuffle.
  const auto& schema = config.profile.schema();
  std::stable_sort(st.reveal_order.begin(), st.reveal_order.end(), [&](const auto& a, const auto& b) {
    return schema.index_of(a).value_or(schema.slots().size()) < schema.index_of(b).value_or(schema.slots().size());
  });
  Rng order_rng(derive_seed(config.style_seed, kOrder));
  shuffle(std::span(st.reveal_order), order_rng);
  Rng style_rng(derive_seed(config.style_seed, kStyle));
  st.style.template_offset = uniform_index(style_rng, 8);
  st.style.exclaim = uniform01(style_rng) < 0.5;
  return st;
}

std::optional<std::pair<UserUtterance, UserState>> next_utterance(const UserState& state,
                                                                  const DialogueState& history,
                                                                  const UserConfig& config) {
  if (state.turn_index >= config.horizon) return std::nullopt;
  if (history.turn_index() != state.turn_index)
    throw ProtocolError("dialogue history is at turn " + std::to_string(history.turn_index()) +
                        " but the simulator is at turn " + std::to_string(state.turn_index));

  UserState next = state;
  const int turn = state.turn_index + 1;
  UserUtterance out{"", {}, turn, std::nullopt};
  std::vector<std::string> sentences;

  if (config.conflict && config.conflict->turn == state.turn_index) {
    for (const auto& [slot, value] : config.conflict->replace) {
      next.active_profile.set(slot, value);
      const auto key = normalize_text(slot);
      std::erase_if(next.revealed, [&](const auto& s) { return normalize_text(s) == key; });
      if (std::none_of(next.reveal_order.begin(), next.reveal_order.end(),
                       [&](const auto& s) { return normalize_text(s) == key; }))
        next.reveal_order.push_back(slot);
    }
    // Changed preferences are announced right away, on top of the schedule.
    for (const auto& [slot, value] : config.conflict->replace) {
      const std::string* current = next.active_profile.find(slot);
      SlotValue ev{slot, *current};
      sentences.push_back(reveal_sentence(next, config, turn, ev, true));
      next.revealed.push_back(slot);
      out.evidence.push_back(std::move(ev));
    }
  }

  int budget = config.reveals_at(turn);
  for (const auto& slot : next.reveal_order) {
    if (budget <= 0) break;
    if (next.is_revealed(slot)) continue;
    const std::string* value = next.active_profile.find(slot);
    if (!value) continue;
    SlotValue ev{slot, *value};
    sentences.push_back(reveal_sentence(next, config, turn, ev, false));
    next.revealed.push_back(slot);
    out.evidence.push_back(std::move(ev));
    --budget;
  }

  const auto& t = data::templates();
  if (out.evidence.empty() && !next.revealed.empty()) {
    Rng rng(derive_seed(config.style_seed, kChitChat, turn));
    const auto& slot = next.revealed[uniform_index(rng, next.revealed.size())];
    sentences.push_back(render(pick(t.at("chit_chat"), next.style.template_offset, rng()), slot,
                               *next.active_profile.find(slot)));
  }

  Rng topic_rng(derive_seed(config.style_seed, kTopic, turn));
  const auto& entries = next.active_profile.entries();
  const auto& topic = entries[uniform_index(topic_rng, entries.size())].first;
  out.topic = topic;
  std::string request = render(pick(t.at("request"), next.style.template_offset, topic_rng()), topic, "");
  if (next.style.exclaim) request += " Thanks!";
  sentences.push_back(std::move(request));

  for (const auto& s : sentences) {
    if (!out.text.empty()) out.text += ' ';
    out.text += s;
  }
  next.turn_index = turn;
  return std::make_pair(std::move(out), std::move(next));
}

double theoretical_max(const UserState& state, const Profile& truth) {
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& [slot, value] : truth.entries()) hits += state.is_revealed(slot);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Profile effective_truth(const UserConfig& config, int turn) {
  Profile truth = config.profile;
  if (config.conflict && turn >= config.conflict->turn)
    for (const auto& [slot, value] : config.conflict->replace) truth.set(slot, value);
  return truth;
}

UserSimulator::UserSimulator(UserConfig config) : config_(std::move(config)), state_(initial_state(config_)) {}

UserUtterance UserSimulator::start() {
  state_ = initial_state(config_);
  return first_utterance(config_);
}

std::optional<UserUtterance> UserSimulator::respond(const DialogueState& history) {
  auto result = next_utterance(state_, history, config_);
  if (!result) return std::nullopt;
  state_ = std::move(result->second);
  return std::move(result->first);
}

}  // namespace dialign
