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

#ifndef PDSYNTH_HTTP_ORACLE_HPP_
#define PDSYNTH_HTTP_ORACLE_HPP_

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "pdsynth/oracle.hpp"

namespace pdsynth {

struct OracleConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o";
  // Name of the environment variable holding the bearer token.
  std::string api_key_env = "OPENAI_API_KEY";
  int max_retries = 2;
  std::chrono::milliseconds timeout{60000};
  // Overrides the per-prompt temperature when set.
  std::optional<double> temperature;
  std::size_t max_in_flight = 4;
};

// Throws SchemaError on a bad config.
void validate_oracle_config(const OracleConfig& config);

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws TransportError when no response arrives.
  virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body, std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport; supports http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_httplib_transport();

// JSON body of an OpenAI-compatible chat-completions request.
std::string chat_request_body(const std::string& model, const OracleRequest& request,
                              double temperature);

// Content of the first choice's message. Throws TransportError if the body is
// not a chat completion.
std::string chat_response_content(const std::string& body);

// Chat-completions oracle. At most `max_in_flight` requests run at once.
class HttpOracle : public Oracle {
 public:
  HttpOracle(OracleConfig config, std::shared_ptr<HttpTransport> transport);

  std::string complete(const OracleRequest& request) override;
  const OracleConfig& config() const { return config_; }

 private:
  OracleConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace pdsynth

#endif  // PDSYNTH_HTTP_ORACLE_HPP_
