// Copyright 2026 The pdsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDSYNTH_SRC_CONFIG_JSON_HPP_
#define PDSYNTH_SRC_CONFIG_JSON_HPP_

#include <string>
#include <string_view>

#include "json.hpp"

namespace pdsynth::internal {

// Parses a config document; syntax errors become ConfigSyntaxError with the
// 1-based line and column of the offending byte.
nlohmann::ordered_json parse_config_json(std::string_view text);

std::string require_string(const nlohmann::ordered_json& obj, const char* key, const std::string& where);

}  // namespace pdsynth::internal

#endif  // PDSYNTH_SRC_CONFIG_JSON_HPP_
