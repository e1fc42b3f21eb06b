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

#ifndef PDSYNTH_CLI_HPP_
#define PDSYNTH_CLI_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "pdsynth/http_oracle.hpp"

namespace pdsynth {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

using TransportFactory = std::function<std::shared_ptr<HttpTransport>()>;

// Directory searched for "fixture:<name>" as <name>.fixture: $PDSYNTH_DATA_DIR
// if set, else the data directory of the source tree.
std::filesystem::path data_dir();

// Runs the tool with `args` (without the program name). The transport factory
// is called only when the http oracle is selected.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const TransportFactory& transports = make_httplib_transport);

}  // namespace pdsynth

#endif  // PDSYNTH_CLI_HPP_
