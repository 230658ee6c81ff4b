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
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "citedisc/dense.hpp"

namespace citedisc {

struct ChatRequest {
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 512;
};

struct ChatResponse {
  std::string text;
  std::string backend_id;
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
};

// One scripted reply. Matches when `match` is a substring of the user text,
// or when `pattern` (ECMAScript regex) is found in it.
struct MockScriptEntry {
  std::string match;
  std::optional<std::string> pattern;
  std::string response;
  bool one_shot = false;
  // Simulated latency, used by concurrency tests.
  std::chrono::milliseconds delay{0};
};

struct GatewayConfig {
  enum class Kind { kMock, kRemote };

  Kind kind = Kind::kMock;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::optional<std::string> api_key_env;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{120000};
  std::size_t max_in_flight = 4;
  std::vector<MockScriptEntry> script;

  void validate() const;

  // Accepts either an inline `script` array or a `script_file` path resolved
  // relative to base_dir.
  static GatewayConfig from_json(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir = {});
  static GatewayConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

std::vector<MockScriptEntry> parse_mock_script(const nlohmann::json& j);

struct CallRecord {
  std::size_t sequence = 0;
  std::string request_digest;
  std::string response_digest;
  std::string prompt_prefix;
  std::chrono::milliseconds latency{0};
  int attempts = 0;
  bool ok = false;
  std::string error;
};

// Shared chat-completion access for every pipeline stage. Thread-safe; the
// number of concurrent backend calls never exceeds max_in_flight.
class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig config);
  ~LlmGateway();

  LlmGateway(const LlmGateway&) = delete;
  LlmGateway& operator=(const LlmGateway&) = delete;

  // Throws ConfigError (unmatched mock request, exhausted script),
  // TransportError (retries exhausted) or Error (non-retryable HTTP status).
  ChatResponse complete(const ChatRequest& request);

  // Audit trail ordered by completion.
  std::vector<CallRecord> call_log() const;
  std::size_t call_count() const;
  void clear_log();

  // Highest number of simultaneous backend calls observed.
  std::size_t peak_in_flight() const;

  const GatewayConfig& config() const { return config_; }
  std::string backend_id() const;

 private:
  std::string complete_mock(const ChatRequest& request);
  std::string post_remote(const ChatRequest& request, int& attempts);
  void record(CallRecord record);

  GatewayConfig config_;
  std::vector<std::optional<std::regex>> patterns_;
  std::counting_semaphore<> slots_;

  mutable std::mutex mutex_;
  std::vector<bool> consumed_;
  std::vector<CallRecord> log_;
  std::size_t in_flight_ = 0;
  std::size_t peak_in_flight_ = 0;
};

}  // namespace citedisc
