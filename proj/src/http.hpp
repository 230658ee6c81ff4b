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

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "citedisc/dense.hpp"

namespace citedisc::detail {

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

// Splits an endpoint URL. Throws ConfigError for anything that is not an
// http(s) URL.
HttpTarget parse_endpoint(const std::string& url);

struct HttpResult {
  int status = 0;
  std::string body;
  int attempts = 0;
};

// POSTs a JSON body, retrying transport failures, 429 and 5xx with
// exponential backoff. Returns the first 2xx response. Throws TransportError
// once attempts run out and Error for other non-2xx statuses (body echoed).
HttpResult post_json(const HttpTarget& target, const std::string& body,
                     const std::optional<std::string>& bearer_token,
                     std::chrono::milliseconds timeout, const RetryPolicy& retry);

// Value of the named environment variable, if both are present.
std::optional<std::string> bearer_from_env(const std::optional<std::string>& env_name);

}  // namespace citedisc::detail
