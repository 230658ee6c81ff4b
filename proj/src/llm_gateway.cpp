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

#include "citedisc/llm_gateway.hpp"

#include <fstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "citedisc/errors.hpp"
#include "citedisc/hashing.hpp"
#include "http.hpp"
#include "text_util.hpp"

namespace citedisc {

using nlohmann::json;

namespace {

constexpr std::size_t kPromptPrefixBytes = 60;

std::string prompt_prefix(std::string_view text) {
  return std::string(detail::utf8_prefix(text, kPromptPrefixBytes));
}

std::string request_digest(const ChatRequest& request) {
  std::string material = request.system_text.value_or("");
  material += '\x1f';
  material += request.user_text;
  return hex_digest(material);
}

}  // namespace

std::vector<MockScriptEntry> parse_mock_script(const json& j) {
  if (!j.is_array()) throw ConfigError("mock script must be a JSON array");
  std::vector<MockScriptEntry> script;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& item = j[i];
    try {
      MockScriptEntry entry;
      entry.match = item.value("match", "");
      if (item.contains("pattern")) entry.pattern = item.at("pattern").get<std::string>();
      entry.response = item.at("response").get<std::string>();
      entry.one_shot = item.value("one_shot", false);
      entry.delay = std::chrono::milliseconds(item.value("delay_ms", 0));
      if (entry.match.empty() && !entry.pattern) {
        throw ConfigError(fmt::format("mock script entry {} needs \"match\" or \"pattern\"", i));
      }
      script.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("mock script entry {}: {}", i, e.what()));
    }
  }
  return script;
}

void GatewayConfig::validate() const {
  if (max_in_flight == 0) throw ConfigError("gateway max_in_flight must be positive");
  if (retry.max_attempts < 1) throw ConfigError("gateway max_attempts must be at least 1");
  if (kind == Kind::kRemote) {
    if (!endpoint || endpoint->empty()) throw ConfigError("remote gateway requires an endpoint");
    if (!model_name || model_name->empty()) throw ConfigError("remote gateway requires a model");
    detail::parse_endpoint(*endpoint);
  } else if (script.empty()) {
    throw ConfigError("mock gateway requires a non-empty script");
  }
}

GatewayConfig GatewayConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("gateway config must be a JSON object");
  GatewayConfig c;
  try {
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
      c.kind = Kind::kMock;
    } else if (kind == "remote") {
      c.kind = Kind::kRemote;
    } else {
      throw ConfigError("unknown gateway kind: " + kind);
    }
    if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("model")) c.model_name = j.at("model").get<std::string>();
    if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
    c.retry.max_attempts = j.value("max_attempts", c.retry.max_attempts);
    c.retry.backoff_base = std::chrono::milliseconds(j.value("backoff_ms", c.retry.backoff_base.count()));
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    if (j.contains("script")) {
      c.script = parse_mock_script(j.at("script"));
    } else if (j.contains("script_file")) {
      auto path = std::filesystem::path(j.at("script_file").get<std::string>());
      if (path.is_relative()) path = base_dir / path;
      std::ifstream in(path);
      if (!in) throw IoError("cannot open mock script " + path.string());
      c.script = parse_mock_script(json::parse(in));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid gateway config: ") + e.what());
  }
  c.validate();
  return c;
}

GatewayConfig GatewayConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gateway config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("gateway config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

json GatewayConfig::to_json() const {
  json j;
  j["kind"] = kind == Kind::kMock ? "mock" : "remote";
  if (endpoint) j["endpoint"] = *endpoint;
  if (model_name) j["model"] = *model_name;
  if (api_key_env) j["api_key_env"] = *api_key_env;
  j["max_attempts"] = retry.max_attempts;
  j["backoff_ms"] = retry.backoff_base.count();
  j["timeout_ms"] = timeout.count();
  j["max_in_flight"] = max_in_flight;
  if (kind == Kind::kMock) {
    json script_json = json::array();
    for (const auto& e : script) {
      json item = {{"match", e.match}, {"response", e.response}, {"one_shot", e.one_shot}};
      if (e.pattern) item["pattern"] = *e.pattern;
      if (e.delay.count() > 0) item["delay_ms"] = e.delay.count();
      script_json.push_back(std::move(item));
    }
    j["script"] = std::move(script_json);
  }
  return j;
}

LlmGateway::LlmGateway(GatewayConfig config)
    : config_(std::move(config)),
      slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(config_.max_in_flight, 1))) {
  config_.validate();
  for (const auto& entry : config_.script) {
    if (!entry.pattern) {
      patterns_.emplace_back();
      continue;
    }
    try {
      patterns_.emplace_back(std::regex(*entry.pattern, std::regex::ECMAScript));
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid mock pattern \"" + *entry.pattern + "\": " + e.what());
    }
  }
  consumed_.assign(config_.script.size(), false);
}

LlmGateway::~LlmGateway() = default;

std::string LlmGateway::backend_id() const {
  if (config_.kind == GatewayConfig::Kind::kMock) return "mock";
  return "remote:" + config_.model_name.value_or("");
}

ChatResponse LlmGateway::complete(const ChatRequest& request) {
  if (request.user_text.empty()) throw std::invalid_argument("chat request has empty user text");

  slots_.acquire();
  {
    std::lock_guard lock(mutex_);
    ++in_flight_;
    peak_in_flight_ = std::max(peak_in_flight_, in_flight_);
  }
  struct SlotGuard {
    LlmGateway* self;
    ~SlotGuard() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->slots_.release();
    }
  } guard{this};

  CallRecord record;
  record.request_digest = request_digest(request);
  record.prompt_prefix = prompt_prefix(request.user_text);
  const auto start = std::chrono::steady_clock::now();
  int attempts = 1;
  try {
    std::string text = config_.kind == GatewayConfig::Kind::kMock
                           ? complete_mock(request)
                           : post_remote(request, attempts);
    ChatResponse response;
    response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    response.attempt_count = attempts;
    response.backend_id = backend_id();
    response.text = std::move(text);

    record.response_digest = hex_digest(response.text);
    record.latency = response.latency;
    record.attempts = attempts;
    record.ok = true;
    this->record(std::move(record));
    return response;
  } catch (const std::exception& e) {
    record.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    if (const auto* t = dynamic_cast<const TransportError*>(&e)) attempts = t->attempts();
    record.attempts = attempts;
    record.error = e.what();
    this->record(std::move(record));
    throw;
  }
}

std::string LlmGateway::complete_mock(const ChatRequest& request) {
  std::size_t chosen = config_.script.size();
  bool saw_consumed = false;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < config_.script.size(); ++i) {
      const auto& entry = config_.script[i];
      bool fires = patterns_[i] ? std::regex_search(request.user_text, *patterns_[i])
                                : request.user_text.find(entry.match) != std::string::npos;
      if (!fires) continue;
      if (consumed_[i]) {
        saw_consumed = true;
        continue;
      }
      if (entry.one_shot) consumed_[i] = true;
      chosen = i;
      break;
    }
  }
  if (chosen == config_.script.size()) {
    const std::string what = saw_consumed ? "mock script exhausted" : "no mock script entry matches";
    throw ConfigError(what + " for prompt starting with \"" + prompt_prefix(request.user_text) + "\"");
  }
  const auto& entry = config_.script[chosen];
  if (entry.delay.count() > 0) std::this_thread::sleep_for(entry.delay);
  return entry.response;
}

std::string LlmGateway::post_remote(const ChatRequest& request, int& attempts) {
  json messages = json::array();
  if (request.system_text) messages.push_back({{"role", "system"}, {"content", *request.system_text}});
  messages.push_back({{"role", "user"}, {"content", request.user_text}});
  const json body = {{"model", *config_.model_name},
                     {"messages", std::move(messages)},
                     {"temperature", request.temperature},
                     {"max_tokens", request.max_output_tokens}};

  const auto result = detail::post_json(
      detail::parse_endpoint(*config_.endpoint),
      body.dump(-1, ' ', false, json::error_handler_t::replace),
      detail::bearer_from_env(config_.api_key_env), config_.timeout, config_.retry);
  attempts = result.attempts;
  try {
    const json reply = json::parse(result.body);
    const json& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed chat completion response: ") + e.what());
  }
}

void LlmGateway::record(CallRecord record) {
  std::lock_guard lock(mutex_);
  record.sequence = log_.size();
  log_.push_back(std::move(record));
}

std::vector<CallRecord> LlmGateway::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t LlmGateway::call_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

void LlmGateway::clear_log() {
  std::lock_guard lock(mutex_);
  log_.clear();
}

std::size_t LlmGateway::peak_in_flight() const {
  std::lock_guard lock(mutex_);
  return peak_in_flight_;
}

}  // namespace citedisc
