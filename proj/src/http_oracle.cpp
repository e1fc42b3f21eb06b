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

#include "pdsynth/http_oracle.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "pdsynth/errors.hpp"

namespace pdsynth {

namespace {

using json = nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed endpoint URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body, std::chrono::milliseconds timeout) override {
    const SplitUrl parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers h;
    for (const auto& [k, v] : headers) {
      if (k != "Content-Type") h.emplace(k, v);
    }
    auto result = client.Post(parts.path, h, body, "application/json");
    if (!result) {
      throw TransportError("POST " + url + " failed: " + httplib::to_string(result.error()));
    }
    return {result->status, result->body};
  }
};

}  // namespace

void validate_oracle_config(const OracleConfig& config) {
  if (config.max_retries < 0) throw SchemaError("max_retries must be >= 0");
  if (config.timeout.count() <= 0) throw SchemaError("timeout must be positive");
  if (config.max_in_flight < 1) throw SchemaError("max_in_flight must be >= 1");
  if (config.endpoint_url.find("://") == std::string::npos) {
    throw SchemaError("endpoint URL '" + config.endpoint_url + "' has no scheme");
  }
}

std::shared_ptr<HttpTransport> make_httplib_transport() {
  return std::make_shared<HttplibTransport>();
}

std::string chat_request_body(const std::string& model, const OracleRequest& request,
                              double temperature) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  json body = {{"model", model}, {"messages", std::move(messages)}, {"temperature", temperature}};
  return body.dump();
}

std::string chat_response_content(const std::string& body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw TransportError("response is not JSON");
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw TransportError("response has no choices");
  }
  const json& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw TransportError("first choice has no message content");
  }
  return first["message"]["content"].get<std::string>();
}

HttpOracle::HttpOracle(OracleConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  validate_oracle_config(config_);
  in_flight_ = std::make_unique<std::counting_semaphore<>>(
      static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

std::string HttpOracle::complete(const OracleRequest& request) {
  std::map<std::string, std::string> headers = {{"Content-Type", "application/json"}};
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers["Authorization"] = std::string("Bearer ") + key;
  }
  const std::string body =
      chat_request_body(config_.model_name, request, config_.temperature.value_or(request.temperature));

  in_flight_->acquire();
  HttpResponse response;
  try {
    response = transport_->post(config_.endpoint_url, headers, body, config_.timeout);
  } catch (...) {
    in_flight_->release();
    throw;
  }
  in_flight_->release();

  if (response.status != 200) {
    throw TransportError("HTTP status " + std::to_string(response.status) + ": " +
                         response.body.substr(0, 200));
  }
  return chat_response_content(response.body);
}

}  // namespace pdsynth
