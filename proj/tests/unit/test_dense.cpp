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

#include <cmath>

#include <json.hpp>

#include "citedisc/dense.hpp"
#include "citedisc/errors.hpp"
#include "citedisc/hashing.hpp"
#include "fake_server.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace citedisc;
using nlohmann::json;

namespace {

EmbeddingProvider mock_provider(std::size_t dim = 256) {
  EmbeddingProviderConfig c;
  c.dim = dim;
  return EmbeddingProvider(c);
}

std::vector<Document> pool_of(const std::vector<std::string>& abstracts) {
  std::vector<Document> pool;
  for (std::size_t i = 0; i < abstracts.size(); ++i) {
    pool.push_back({"c" + std::to_string(i + 1), std::nullopt, abstracts[i]});
  }
  return pool;
}

// Deterministic fake embedding: component j = (len(text) + j) % 5 + 1.
json fake_embedding(const std::string& text, std::size_t dim) {
  json v = json::array();
  for (std::size_t j = 0; j < dim; ++j) v.push_back(static_cast<double>((text.size() + j) % 5 + 1));
  return v;
}

}  // namespace

TEST_CASE("murmur3 reference values") {
  // Reference values from the canonical MurmurHash3_x86_32 implementation.
  CHECK(murmur3_32("", 0) == 0u);
  CHECK(murmur3_32("a", 0) == 1009084850u);
  CHECK(murmur3_32("b", 0) == 2514386435u);
  CHECK(murmur3_32("abcd", 0) == 1139631978u);
  CHECK(murmur3_32("abcde", 0) == 3902511862u);
  CHECK(murmur3_32("hello world", 0) == 1586663183u);
}

TEST_CASE("mock embedding hashes tokens into buckets") {
  // h("a") % 8 == 2 and h("b") % 8 == 3, so "a a b" -> (2, 1) / sqrt(5).
  auto provider = mock_provider(8);
  const std::vector<std::string> texts = {"a a b"};
  auto result = provider.embed(texts);
  REQUIRE(result.vectors.size() == 1);
  const auto& v = result.vectors[0].values();
  std::vector<double> expected(8, 0.0);
  expected[2] = 2.0 / std::sqrt(5.0);
  expected[3] = 1.0 / std::sqrt(5.0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(v[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(result.warnings.empty());
}

TEST_CASE("identical texts embed identically, in order") {
  auto provider = mock_provider();
  const std::vector<std::string> texts = {"retrieval models", "graphs", "retrieval models"};
  auto result = provider.embed(texts);
  REQUIRE(result.vectors.size() == 3);
  CHECK(result.vectors[0] == result.vectors[2]);
  CHECK_FALSE(result.vectors[0] == result.vectors[1]);
  for (const auto& v : result.vectors) {
    double sq = 0.0;
    for (double x : v.values()) sq += x * x;
    CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-9);
  }
}

TEST_CASE("empty text yields the zero vector with a warning") {
  auto provider = mock_provider();
  const std::vector<std::string> texts = {"", "words"};
  auto result = provider.embed(texts);
  CHECK(result.vectors[0].is_zero());
  CHECK(result.vectors[0].dim() == 256);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("text 0") != std::string::npos);
  std::vector<std::string> none;
  CHECK_THROWS_AS(provider.embed(none), std::invalid_argument);
}

TEST_CASE("build_store") {
  auto provider = mock_provider();
  auto pool = pool_of({"alpha beta", "gamma", "delta epsilon"});
  pool[0].title = "Title";
  auto store = VectorStore::build(pool, provider);
  CHECK(store.size() == 3);
  CHECK(store.dim() == 256);
  CHECK(store.vector(0) == hashed_embedding("Title alpha beta", 256));
  CHECK(VectorStore::build(pool, provider) == store);
  std::vector<Document> empty;
  CHECK_THROWS_AS(VectorStore::build(empty, provider), std::invalid_argument);
}

TEST_CASE("dense retrieval") {
  auto provider = mock_provider();
  auto pool = pool_of({"language models for citation", "graph neural networks",
                       "dense passage retrieval", "sparse retrieval baselines",
                       "citation intent classification", "retrieval augmented generation"});
  auto store = VectorStore::build(pool, provider);

  SUBCASE("a stored document retrieves itself first") {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      auto ranked = retrieve_topk_dense(embedding_text(pool[i]), store, provider, 1);
      CHECK(ranked.entries[0].id == pool[i].id);
      CHECK(std::abs(ranked.entries[0].score - 1.0) <= 1e-9);
    }
  }
  SUBCASE("k at least pool size ranks the whole pool") {
    CHECK(retrieve_topk_dense("retrieval", store, provider, 6).size() == 6);
    CHECK(retrieve_topk_dense("retrieval", store, provider, 60).size() == 6);
  }
  SUBCASE("matches an exhaustive dot-product oracle") {
    const std::string query = "citation retrieval with language models";
    const auto q = hashed_embedding(query, 256);
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto d = hashed_embedding(pool[i].abstract, 256);
      double s = 0.0;
      for (std::size_t j = 0; j < 256; ++j) s += q.values()[j] * d.values()[j];
      scored.emplace_back(pool[i].id, s);
    }
    auto oracle = testing::brute_force_rank(scored);
    auto ranked = retrieve_topk_dense(query, store, provider, 6);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(ranked.entries[i].id == oracle[i].first);
      CHECK(std::abs(ranked.entries[i].score - oracle[i].second) < 1e-12);
    }
  }
}

TEST_CASE("rankings are invariant to positive rescaling of raw vectors") {
  std::uint64_t state = 3;
  auto rnd = [&] { return static_cast<double>(testing::splitmix64(state) % 1000) / 100.0 - 5.0; };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> raw(6, std::vector<double>(16));
    for (auto& v : raw) for (auto& x : v) x = rnd();
    std::vector<double> q(16);
    for (auto& x : q) x = rnd();
    const double c = 0.01 + static_cast<double>(testing::splitmix64(state) % 1000);

    std::vector<std::string> ids;
    std::vector<EmbeddingVector> plain, scaled;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      ids.push_back("d" + std::to_string(i));
      plain.push_back(EmbeddingVector::normalized(raw[i]));
      auto s = raw[i];
      for (auto& x : s) x *= c;
      scaled.push_back(EmbeddingVector::normalized(s));
    }
    auto a = VectorStore::from_vectors(ids, plain).rank(EmbeddingVector::normalized(q), 6);
    auto b = VectorStore::from_vectors(ids, scaled).rank(EmbeddingVector::normalized(q), 6);
    CHECK(a.ids() == b.ids());
    for (std::size_t k = 1; k < 6; ++k) {
      CHECK(VectorStore::from_vectors(ids, plain).rank(EmbeddingVector::normalized(q), k).entries ==
            a.prefix(k).entries);
    }
  }
}

TEST_CASE("config validation") {
  EmbeddingProviderConfig c;
  c.kind = EmbeddingProviderConfig::Kind::kRemote;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.endpoint = "http://localhost:1/v1/embeddings";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.model_name = "encoder";
  CHECK_NOTHROW(c.validate());
  c.endpoint = "localhost";
  CHECK_THROWS_AS(c.validate(), ConfigError);

  auto parsed = EmbeddingProviderConfig::from_json(json::parse(R"({"kind":"mock","dim":32})"));
  CHECK(parsed.dim == 32);
  CHECK_THROWS_AS(EmbeddingProviderConfig::from_json(json::parse(R"({"kind":"remote"})")),
                  ConfigError);
  CHECK_THROWS_AS(EmbeddingProviderConfig::from_json(json::parse(R"({"kind":"onnx"})")), ConfigError);
}

TEST_CASE("remote embeddings over HTTP") {
  std::atomic<int> max_batch{0};
  testing::FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    CHECK(body.at("model") == "enc");
    CHECK(req.get_header_value("Authorization") == "Bearer secret-token");
    const auto& input = body.at("input");
    max_batch = std::max<int>(max_batch, static_cast<int>(input.size()));
    json data = json::array();
    // Reply in reverse order; the client must reorder by index.
    for (std::size_t i = input.size(); i-- > 0;) {
      data.push_back({{"index", i}, {"embedding", fake_embedding(input[i].get<std::string>(), 4)}});
    }
    res.set_content(json{{"data", data}}.dump(), "application/json");
  });
  setenv("CITEDISC_TEST_EMBED_KEY", "secret-token", 1);

  EmbeddingProviderConfig c;
  c.kind = EmbeddingProviderConfig::Kind::kRemote;
  c.endpoint = server.url("/v1/embeddings");
  c.model_name = "enc";
  c.dim = 4;
  c.batch_size = 2;
  c.api_key_env = "CITEDISC_TEST_EMBED_KEY";
  EmbeddingProvider provider(c);

  const std::vector<std::string> texts = {"a", "bb", "ccc", "a", "dddd", ""};
  auto result = provider.embed(texts);
  REQUIRE(result.vectors.size() == 6);
  for (std::size_t i = 0; i < 5; ++i) {
    auto expected = EmbeddingVector::normalized(fake_embedding(texts[i], 4).get<std::vector<double>>());
    CHECK(result.vectors[i] == expected);
  }
  CHECK(result.vectors[5].is_zero());
  CHECK(max_batch.load() <= 2);
  // Four distinct texts in batches of two.
  CHECK(provider.remote_calls() == 2);

  // Cached texts are not requested again.
  (void)provider.embed(std::vector<std::string>{"a", "ccc"});
  CHECK(provider.remote_calls() == 2);
}

TEST_CASE("remote embedding contract violations") {
  SUBCASE("wrong vector count") {
    testing::FakeServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"data":[{"index":0,"embedding":[1,0]}]})", "application/json");
    });
    EmbeddingProviderConfig c;
    c.kind = EmbeddingProviderConfig::Kind::kRemote;
    c.endpoint = server.url("/embed");
    c.model_name = "enc";
    c.dim = 2;
    EmbeddingProvider provider(c);
    auto pool = pool_of({"one", "two", "three"});
    try {
      (void)VectorStore::build(pool, provider);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string what = e.what();
      CHECK(what.find("returned 1 vectors, expected 3") != std::string::npos);
    }
  }
  SUBCASE("dimension mismatch") {
    testing::FakeServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"data":[{"index":0,"embedding":[1,0,0]}]})", "application/json");
    });
    EmbeddingProviderConfig c;
    c.kind = EmbeddingProviderConfig::Kind::kRemote;
    c.endpoint = server.url("/embed");
    c.model_name = "enc";
    c.dim = 2;
    EmbeddingProvider provider(c);
    CHECK_THROWS_WITH_AS(provider.embed(std::vector<std::string>{"x"}),
                         doctest::Contains("dimension mismatch"), Error);
  }
  SUBCASE("unreachable endpoint") {
    EmbeddingProviderConfig c;
    c.kind = EmbeddingProviderConfig::Kind::kRemote;
    c.endpoint = "http://127.0.0.1:1/embed";
    c.model_name = "enc";
    c.retry.max_attempts = 2;
    c.retry.backoff_base = std::chrono::milliseconds(1);
    EmbeddingProvider provider(c);
    CHECK_THROWS_AS(provider.embed(std::vector<std::string>{"x"}), TransportError);
  }
}
