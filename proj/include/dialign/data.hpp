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

#include <string>
#include <vector>

#include <json.hpp>

namespace dialign::data {

/// Parsed views over the JSON files under data/, compiled into the library.
const nlohmann::ordered_json& value_pools();
const nlohmann::ordered_json& paraphrase_rules();
const nlohmann::ordered_json& templates();

/// Value pool for a slot; checks the closed-schema pools first, then the
/// open-schema ones. Empty when the slot is unknown.
std::vector<std::string> pool_for(const std::string& slot);

}  // namespace dialign::data
