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

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "citedisc/errors.hpp"
#include "citedisc/llm_gateway.hpp"
#include "fake_server.hpp"

using namespace citedisc;
using nlohmann::json;

namespace {

GatewayConfig scripted(std::vector<MockScriptEntry> script) {
  GatewayConfig c;
  c.script = std::move(script);
  return c;
}

ChatRequest ask(std::string text) {
  ChatRequest r;
  r.user_text = std::move(text);
  return r;
}

GatewayConfig remote_config(const std::string& url) {
  GatewayConfig c;
  c.kind = GatewayConfig::Kind::kRemote;
  c.endpoint = url;
  c.model_name = "chat-model";
  c.retry.max_attempts = 3;
  c.retry.backoff_base = std::chrono::milliseconds(1);
  return c;
}

std::string chat_reply(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST_CASE("mock gateway replays scripted responses") {
  LlmGateway gateway(scripted({{"extract", std::nullopt, "A | uses | B", false, {}},
                               {"select", std::nullopt, "c1", false, {}}}));
  auto r1 = gateway.complete(ask("please extract triples"));
  CHECK(r1.text == "A | uses | B");
  CHECK(r1.backend_id == "mock");
  CHECK(r1.attempt_count == 1);
  CHECK(gateway.complete(ask("now select ids")).text == "c1");
  // First matching entry wins.
  CHECK(gateway.complete(ask("extract then select")).text == "A | uses | B");
  CHECK(gateway.call_count() == 3);
}

TEST_CASE("regex entries and one-shot entries") {
  LlmGateway gateway(scripted({{"", std::string("c[0-9]+ and c[0-9]+"), "regex hit", false, {}},
                               {"hello", std::nullopt, "first", true, {}},
                               {"hello", std::nullopt, "second", true, {}}}));
  CHECK(gateway.complete(ask("pick c3 and c14")).text == "regex hit");
  CHECK(gateway.complete(ask("hello")).text == "first");
  CHECK(gateway.complete(ask("hello")).text == "second");
  CHECK_THROWS_WITH_AS(gateway.complete(ask("hello")), doctest::Contains("exhausted"), ConfigError);
}

TEST_CASE("unmatched mock request is a configuration error naming the prompt") {
  LlmGateway gateway(scripted({{"alpha", std::nullopt, "x", false, {}}}));
  CHECK_THROWS_WITH_AS(gateway.complete(ask("beta gamma")),
                       doctest::Contains("no mock script entry matches for prompt starting with \"beta gamma\""),
                       ConfigError);
  auto log = gateway.call_log();
  REQUIRE(log.size() == 1);
  CHECK_FALSE(log[0].ok);
  CHECK(log[0].error.find("no mock script entry") != std::string::npos);
}

TEST_CASE("config validation and parsing") {
  CHECK_THROWS_AS(LlmGateway(GatewayConfig{}), ConfigError);
  GatewayConfig remote;
  remote.kind = GatewayConfig::Kind::kRemote;
  CHECK_THROWS_AS(remote.validate(), ConfigError);
  CHECK_THROWS_AS(parse_mock_script(json::parse(R"([{"response":"x"}])")), ConfigError);
  CHECK_THROWS_AS(parse_mock_script(json::parse(R"({"match":"a"})")), ConfigError);
  CHECK_THROWS_AS(LlmGateway(scripted({{"", std::string("(unclosed"), "x", false, {}}})),
                  ConfigError);

  auto parsed = GatewayConfig::from_json(json::parse(
      R"({"kind":"mock","max_in_flight":2,"script":[{"match":"a","response":"b","one_shot":true}]})"));
  CHECK(parsed.max_in_flight == 2);
  REQUIRE(parsed.script.size() == 1);
  CHECK(parsed.script[0].one_shot);
  auto round = GatewayConfig::from_json(parsed.to_json());
  CHECK(round.script[0].response == "b");
  CHECK(round.max_in_flight == 2);
}

TEST_CASE("script_file resolves against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "citedisc_gateway_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "script.json") << R"([{"match":"q","response":"answer"}])";
  std::ofstream(dir / "gateway.json") << R"({"kind":"mock","script_file":"script.json"})";
  LlmGateway gateway(GatewayConfig::from_file(dir / "gateway.json"));
  CHECK(gateway.complete(ask("q")).text == "answer");
  std::ofstream(dir / "bad.json") << "{not json";
  CHECK_THROWS_AS(GatewayConfig::from_file(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(GatewayConfig::from_file(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("call log") {
  LlmGateway gateway(scripted({{"x", std::nullopt, "y", false, {}}}));
  CHECK(gateway.call_log().empty());
  for (int i = 0; i < 5; ++i) gateway.complete(ask("x" + std::to_string(i)));
  auto log = gateway.call_log();
  REQUIRE(log.size() == 5);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].sequence == i);
    CHECK(log[i].ok);
    CHECK(log[i].request_digest.size() == 16);
    CHECK(log[i].response_digest == log[0].response_digest);
  }
  CHECK(log[0].request_digest != log[1].request_digest);
  gateway.clear_log();
  CHECK(gateway.call_count() == 0);
}

TEST_CASE("identical requests give identical responses") {
  LlmGateway a(scripted({{"p", std::nullopt, "r", false, {}}}));
  LlmGateway b(scripted({{"p", std::nullopt, "r", false, {}}}));
  CHECK(a.complete(ask("p q")).text == b.complete(ask("p q")).text);
  CHECK(a.call_log()[0].request_digest == b.call_log()[0].request_digest);
}

TEST_CASE("in-flight calls never exceed the limit") {
  for (std::size_t limit : {1u, 2u, 4u}) {
    GatewayConfig c = scripted({{"go", std::nullopt, "ok", false, std::chrono::milliseconds(20)}});
    c.max_in_flight = limit;
    LlmGateway gateway(c);
    std::vector<std::jthread> threads;
    for (int t = 0; t < 12; ++t) {
      threads.emplace_back([&] { gateway.complete(ask("go")); });
    }
    threads.clear();
    CHECK(gateway.peak_in_flight() <= limit);
    CHECK(gateway.peak_in_flight() >= 1);
    CHECK(gateway.call_count() == 12);
  }
}

TEST_CASE("remote gateway speaks chat completions") {
  testing::FakeServer server([](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    CHECK(body.at("model") == "chat-model");
    CHECK(body.at("temperature") == 0.0);
    const auto& messages = body.at("messages");
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].at("role") == "system");
    CHECK(messages[1].at("role") == "user");
    res.set_content(chat_reply("echo: " + messages[1].at("content").get<std::string>()),
                    "application/json");
  });
  LlmGateway gateway(remote_config(server.url("/v1/chat/completions")));
  ChatRequest r = ask("hi");
  r.system_text = "be brief";
  auto response = gateway.complete(r);
  CHECK(response.text == "echo: hi");
  CHECK(response.backend_id == "remote:chat-model");
  CHECK(response.attempt_count == 1);
}

TEST_CASE("remote gateway retries server errors") {
  std::atomic<int> calls{0};
  testing::FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 500;
      res.set_content("overloaded", "text/plain");
      return;
    }
    res.set_content(chat_reply("finally"), "application/json");
  });
  LlmGateway gateway(remote_config(server.url("/chat")));
  auto response = gateway.complete(ask("x"));
  CHECK(response.text == "finally");
  CHECK(response.attempt_count == 3);
  CHECK(gateway.call_log()[0].attempts == 3);
}

TEST_CASE("remote gateway gives up after max attempts") {
  testing::FakeServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("down", "text/plain");
  });
  LlmGateway gateway(remote_config(server.url("/chat")));
  CHECK_THROWS_AS(gateway.complete(ask("x")), TransportError);
  CHECK(server.requests() == 3);
  auto log = gateway.call_log();
  REQUIRE(log.size() == 1);
  CHECK_FALSE(log[0].ok);
  CHECK(log[0].attempts == 3);
}

TEST_CASE("non-retryable status echoes the body") {
  testing::FakeServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad model name", "text/plain");
  });
  LlmGateway gateway(remote_config(server.url("/chat")));
  CHECK_THROWS_WITH_AS(gateway.complete(ask("x")), doctest::Contains("bad model name"), Error);
  CHECK(server.requests() == 1);
}

TEST_CASE("unreachable endpoint is a transport error") {
  LlmGateway gateway(remote_config("http://127.0.0.1:1/chat"));
  CHECK_THROWS_AS(gateway.complete(ask("x")), TransportError);
}
