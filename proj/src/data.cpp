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

#include "dialign/data.hpp"

#include <string_view>

namespace dialign::data {

extern const std::string_view k_templates;
extern const std::string_view k_value_pools;
extern const std::string_view k_paraphrase_rules;


const nlohmann::ordered_json& value_pools() {
  static const auto doc = nlohmann::ordered_json::parse(k_value_pools);
  return doc;
}

const nlohmann::ordered_json& paraphrase_rules() {
  static const auto doc = nlohmann::ordered_json::parse(k_paraphrase_rules);
  return doc;
}

const nlohmann::ordered_json& templates() {
  static const auto doc = nlohmann::ordered_json::parse(k_templates);
  return doc;
}

std::vector<std::string> pool_for(const std::string& slot) {
  const auto& pools = value_pools();
  for (const char* section : {"values", "open_slots"}) {
    const auto& table = pools.at(section);
    if (auto it = table.find(slot); it != table.end()) return it->get<std::vector<std::string>>();
  }
  return {};
}

}  // namespace dialign::data
