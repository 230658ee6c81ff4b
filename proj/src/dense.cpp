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

#include "citedisc/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "citedisc/errors.hpp"
#include "citedisc/hashing.hpp"
#include "citedisc/parallel.hpp"
#include "citedisc/textproc.hpp"
#include "http.hpp"
#include "text_util.hpp"

namespace citedisc {

using nlohmann::json;

EmbeddingVector EmbeddingVector::normalized(std::vector<double> raw) {
  if (raw.empty()) throw std::invalid_argument("embedding must have at least one dimension");
  double sq = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite embedding value");
    sq += x * x;
  }
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (double& x : raw) x /= norm;
  }
  EmbeddingVector v;
  v.values_ = std::move(raw);
  return v;
}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("embedding must have at least one dimension");
  EmbeddingVector v;
  v.values_.assign(dim, 0.0);
  return v;
}

bool EmbeddingVector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: {} vs {}", a.dim(), b.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a.values()[i] * b.values()[i];
  return sum;
}

void EmbeddingProviderConfig::validate() const {
  if (dim == 0) throw ConfigError("embedder dim must be positive");
  if (max_in_flight == 0) throw ConfigError("embedder max_in_flight must be positive");
  if (batch_size == 0) throw ConfigError("embedder batch_size must be positive");
  if (retry.max_attempts < 1) throw ConfigError("embedder max_attempts must be at least 1");
  if (kind == Kind::kRemote) {
    if (!endpoint || endpoint->empty()) throw ConfigError("remote embedder requires an endpoint");
    if (!model_name || model_name->empty()) throw ConfigError("remote embedder requires a model");
    detail::parse_endpoint(*endpoint);
  }
}

EmbeddingProviderConfig EmbeddingProviderConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("embedder config must be a JSON object");
  EmbeddingProviderConfig c;
  try {
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
      c.kind = Kind::kMock;
    } else if (kind == "remote") {
      c.kind = Kind::kRemote;
    } else {
      throw ConfigError("unknown embedder kind: " + kind);
    }
    if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("model")) c.model_name = j.at("model").get<std::string>();
    if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
    c.dim = j.value("dim", c.dim);
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
    c.retry.max_attempts = j.value("max_attempts", c.retry.max_attempts);
    c.retry.backoff_base = std::chrono::milliseconds(j.value("backoff_ms", c.retry.backoff_base.count()));
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.batch_size = j.value("batch_size", c.batch_size);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid embedder config: ") + e.what());
  }
  c.validate();
  return c;
}

json EmbeddingProviderConfig::to_json() const {
  json j;
  j["kind"] = kind == Kind::kMock ? "mock" : "remote";
  if (endpoint) j["endpoint"] = *endpoint;
  if (model_name) j["model"] = *model_name;
  if (api_key_env) j["api_key_env"] = *api_key_env;
  j["dim"] = dim;
  j["timeout_ms"] = timeout.count();
  j["max_attempts"] = retry.max_attempts;
  j["backoff_ms"] = retry.backoff_base.count();
  j["max_in_flight"] = max_in_flight;
  j["batch_size"] = batch_size;
  return j;
}

EmbeddingVector hashed_embedding(std::string_view text, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("embedding must have at least one dimension");
  std::vector<double> buckets(dim, 0.0);
  for (const auto& token : tokenize(text)) buckets[murmur3_32(token, 0) % dim] += 1.0;
  return EmbeddingVector::normalized(std::move(buckets));
}

std::string embedding_text(const Document& doc) {
  if (!doc.title || detail::trim(*doc.title).empty()) return doc.abstract;
  return *doc.title + " " + doc.abstract;
}

EmbeddingProvider::EmbeddingProvider(EmbeddingProviderConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::size_t EmbeddingProvider::remote_calls() const {
  std::lock_guard lock(mutex_);
  return remote_calls_;
}

EmbedResult EmbeddingProvider::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw std::invalid_argument("embed needs at least one text");

  EmbedResult result;
  result.vectors.resize(texts.size());
  std::vector<std::string> pending;
  std::vector<std::size_t> pending_slots;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (detail::trim(texts[i]).empty()) {
      result.vectors[i] = EmbeddingVector::zeros(config_.dim);
      result.warnings.push_back(fmt::format("text {} is empty; using the zero vector", i));
    } else if (config_.kind == EmbeddingProviderConfig::Kind::kMock) {
      result.vectors[i] = hashed_embedding(texts[i], config_.dim);
    } else {
      pending.push_back(texts[i]);
      pending_slots.push_back(i);
    }
  }
  if (!pending.empty()) {
    auto vectors = embed_remote(pending);
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      result.vectors[pending_slots[j]] = std::move(vectors[j]);
    }
  }
  return result;
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_remote(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto& t : texts) {
      if (!cache_.contains(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }

  const std::size_t batch = config_.batch_size;
  const std::size_t n_batches = (missing.size() + batch - 1) / batch;
  std::vector<std::vector<EmbeddingVector>> batches(n_batches);
  parallel_for(n_batches, config_.max_in_flight, [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t count = std::min(batch, missing.size() - begin);
    batches[b] = post_batch(std::span<const std::string>(missing).subspan(begin, count));
  });

  std::lock_guard lock(mutex_);
  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t j = 0; j < batches[b].size(); ++j) {
      cache_.emplace(missing[b * batch + j], std::move(batches[b][j]));
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cache_.find(t)->second);
  return out;
}

std::vector<EmbeddingVector> EmbeddingProvider::post_batch(std::span<const std::string> texts) {
  json body = {{"model", *config_.model_name}, {"input", json::array()}};
  for (const auto& t : texts) body["input"].push_back(t);

  const auto target = detail::parse_endpoint(*config_.endpoint);
  {
    std::lock_guard lock(mutex_);
    ++remote_calls_;
  }
  const auto response =
      detail::post_json(target, body.dump(-1, ' ', false, json::error_handler_t::replace),
                        detail::bearer_from_env(config_.api_key_env), config_.timeout,
                        config_.retry);

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<bool> filled(texts.size(), false);
  try {
    const json reply = json::parse(response.body);
    const json& data = reply.at("data");
    if (data.size() != texts.size()) {
      throw Error(fmt::format("embedding endpoint returned {} vectors, expected {}", data.size(),
                              texts.size()));
    }
    for (std::size_t pos = 0; pos < data.size(); ++pos) {
      const json& item = data[pos];
      const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : pos;
      if (index >= texts.size() || filled[index]) {
        throw Error(fmt::format("embedding endpoint returned bad index {}", index));
      }
      auto raw = item.at("embedding").get<std::vector<double>>();
      if (raw.size() != config_.dim) {
        throw Error(fmt::format("embedding dimension mismatch: expected {}, got {}", config_.dim,
                                raw.size()));
      }
      out[index] = EmbeddingVector::normalized(std::move(raw));
      filled[index] = true;
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed embedding response: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("malformed embedding response: ") + e.what());
  }
  return out;
}

VectorStore VectorStore::from_vectors(std::vector<std::string> ids,
                                      std::vector<EmbeddingVector> vectors) {
  if (ids.empty()) throw std::invalid_argument("vector store needs at least one document");
  if (ids.size() != vectors.size()) {
    throw Error(fmt::format("embedding provider returned {} vectors, expected {}", vectors.size(),
                            ids.size()));
  }
  VectorStore store;
  store.dim_ = vectors.front().dim();
  for (const auto& v : vectors) {
    if (v.dim() != store.dim_) {
      throw Error(fmt::format("vector store dimension mismatch: {} vs {}", v.dim(), store.dim_));
    }
  }
  store.ids_ = std::move(ids);
  store.vectors_ = std::move(vectors);
  return store;
}

VectorStore VectorStore::build(std::span<const Document> pool, EmbeddingProvider& provider) {
  if (pool.empty()) throw std::invalid_argument("vector store needs at least one document");
  std::vector<std::string> texts;
  std::vector<std::string> ids;
  for (const auto& doc : pool) {
    texts.push_back(embedding_text(doc));
    ids.push_back(doc.id);
  }
  EmbedResult result = provider.embed(texts);
  VectorStore store = from_vectors(std::move(ids), std::move(result.vectors));
  store.warnings_ = std::move(result.warnings);
  return store;
}

RankedList VectorStore::rank(const EmbeddingVector& query, std::size_t k) const {
  std::vector<ScoredId> scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) scored.push_back({ids_[i], dot(query, vectors_[i])});
  return rank_top_k(std::move(scored), k);
}

RankedList retrieve_topk_dense(std::string_view query, const VectorStore& store,
                               EmbeddingProvider& provider, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (store.size() == 0) throw std::invalid_argument("vector store is empty");
  const std::string text(query);
  EmbedResult q = provider.embed(std::span<const std::string>(&text, 1));
  if (q.vectors.front().dim() != store.dim()) {
    throw Error(fmt::format("query embedding has dim {}, store has {}", q.vectors.front().dim(),
                            store.dim()));
  }
  return store.rank(q.vectors.front(), k);
}

}  // namespace citedisc
