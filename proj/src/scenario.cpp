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

#include "dialign/scenario.hpp"

#include <cstdio>

#include "dialign/data.hpp"
#include "dialign/error.hpp"
#include "dialign/rng.hpp"

namespace dialign {

namespace {

SchemaPtr open_schema_for(std::vector<std::string> slots) {
  return std::make_shared<const SlotSchema>("open", std::move(slots), true);
}

std::string pick(const std::vector<std::string>& pool, Rng& rng) { return pool[uniform_index(rng, pool.size())]; }

}  // namespace

Profile generate_profile(bool open_schema, int open_slots, Rng& rng) {
  if (!open_schema) {
    Profile p(SlotSchema::aloe());
    for (const auto& slot : p.schema().slots()) p.set(slot, pick(data::pool_for(slot), rng));
    return p;
  }
  std::vector<std::string> names;
  for (const auto& [slot, values] : data::value_pools().at("open_slots").items()) names.push_back(slot);
  if (open_slots < 1 || open_slots > static_cast<int>(names.size()))
    throw ArgumentError("open profiles support 1.." + std::to_string(names.size()) + " slots");
  shuffle(std::span<std::string>(names), rng);
  names.resize(static_cast<std::size_t>(open_slots));
  Profile p(open_schema_for(names));
  for (const auto& slot : names) p.set(slot, pick(data::pool_for(slot), rng));
  return p;
}

ConflictSpec default_conflict(const UserConfig& config, int turn, std::uint64_t seed) {
  const auto order = initial_state(config).reveal_order;
  if (order.empty()) throw ConfigError("scenario '" + config.id + "' has an empty profile");
  const std::string& slot = order.front();
  const std::string old_value = *config.profile.find(slot);
  std::vector<std::string> disjoint;
  std::vector<std::string> different;
  for (auto& v : data::pool_for(slot)) {
    if (normalize_text(v) == normalize_text(old_value)) continue;
    if (jaccard(v, old_value) == 0.0) disjoint.push_back(v);
    different.push_back(std::move(v));
  }
  Rng rng(derive_seed(seed, fnv1a(config.id)));
  std::string replacement;
  if (!disjoint.empty()) replacement = pick(disjoint, rng);
  else if (!different.empty()) replacement = pick(different, rng);
  else replacement = "changed " + old_value;
  return ConflictSpec{turn, {{slot, replacement}}};
}

std::vector<UserConfig> generate_scenarios(const ScenarioOptions& options) {
  if (options.count < 1) throw ArgumentError("scenario count must be at least 1");
  if (options.horizon < 1) throw ArgumentError("horizon must be at least 1");
  std::vector<UserConfig> out;
  out.reserve(static_cast<std::size_t>(options.count));
  for (int i = 0; i < options.count; ++i) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(i)));
    char id[32];
    std::snprintf(id, sizeof(id), "scenario_%03d", i);
    UserConfig c{id, generate_profile(options.open_schema, options.open_slots, rng), {}, std::nullopt, rng(),
                 options.horizon};
    if (options.with_conflict) c.conflict = default_conflict(c, options.conflict_turn, options.seed);
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace dialign
