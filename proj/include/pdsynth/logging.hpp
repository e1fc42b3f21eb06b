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

#ifndef PDSYNTH_LOGGING_HPP_
#define PDSYNTH_LOGGING_HPP_

#include <functional>
#include <string_view>

namespace pdsynth {

using WarningSink = std::function<void(std::string_view)>;

// Replaces the process-wide warning sink (stderr by default) and returns the
// previous one. Pass nullptr to restore the default.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace pdsynth

#endif  // PDSYNTH_LOGGING_HPP_
