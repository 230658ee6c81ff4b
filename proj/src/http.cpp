// Copyright 2026 The citedisc Authors.
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

#include "http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "citedisc/errors.hpp"

namespace citedisc::detail {

HttpTarget parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint is not a URL: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported endpoint scheme: " + scheme);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  HttpTarget target;
  target.origin = url.substr(0, path_start);
  target.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (target.origin.size() <= scheme_end + 3) throw ConfigError("endpoint has no host: " + url);
  return target;
}

std::optional<std::string> bearer_from_env(const std::optional<std::string>& env_name) {
  if (!env_name || env_name->empty()) return std::nullopt;
  const char* value = std::getenv(env_name->c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

HttpResult post_json(const HttpTarget& target, const std::string& body,
                     const std::optional<std::string>& bearer_token,
                     std::chrono::milliseconds timeout, const RetryPolicy& retry) {
  httplib::Client client(target.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (bearer_token) headers.emplace("Authorization", "Bearer " + *bearer_token);

  const int max_attempts = std::max(1, retry.max_attempts);
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(retry.backoff_base * (1LL << std::min(attempt - 2, 16)));
    }
    auto res = client.Post(target.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return HttpResult{res->status, res->body, attempt};
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      continue;
    }
    throw Error("HTTP " + std::to_string(res->status) + " from " + target.origin + target.path +
                ": " + res->body);
  }
  throw TransportError(target.origin + target.path + " failed after " +
                           std::to_string(max_attempts) + " attempts (" + last_error + ")",
                       max_attempts);
}

}  // namespace citedisc::detail
