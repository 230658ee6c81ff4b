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
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "citedisc/corpus.hpp"
#include "citedisc/ranking.hpp"

namespace citedisc {

// Unit-length dense vector, or all zeros.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // L2-normalizes raw. Throws std::invalid_argument on non-finite values or
  // an empty input.
  static EmbeddingVector normalized(std::vector<double> raw);
  static EmbeddingVector zeros(std::size_t dim);

  std::size_t dim() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  bool is_zero() const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{200};
};

struct EmbeddingProviderConfig {
  enum class Kind { kMock, kRemote };

  Kind kind = Kind::kMock;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::size_t dim = 256;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 64;
  // Environment variable holding the bearer token, if any.
  std::optional<std::string> api_key_env;

  // Throws ConfigError when a remote config lacks endpoint or model.
  void validate() const;

  static EmbeddingProviderConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct EmbedResult {
  std::vector<EmbeddingVector> vectors;
  std::vector<std::string> warnings;
};

// Turns texts into unit vectors. The mock kind hashes tokens into dim buckets
// (MurmurHash3, seed 0) and needs no network. The remote kind speaks the
// common embeddings wire format and caches vectors per text.
class EmbeddingProvider {
 public:
  explicit EmbeddingProvider(EmbeddingProviderConfig config);

  // One vector per text, in input order. Throws std::invalid_argument for an
  // empty batch, TransportError or Error on remote failures.
  EmbedResult embed(std::span<const std::string> texts);

  const EmbeddingProviderConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }
  // Remote HTTP requests issued so far (0 for the mock).
  std::size_t remote_calls() const;

 private:
  std::vector<EmbeddingVector> embed_remote(std::span<const std::string> texts);
  std::vector<EmbeddingVector> post_batch(std::span<const std::string> texts);

  EmbeddingProviderConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, EmbeddingVector, std::less<>> cache_;
  std::size_t remote_calls_ = 0;
};

// Mock embedding of one text. Exposed for tests and the Python module.
EmbeddingVector hashed_embedding(std::string_view text, std::size_t dim);

// Text embedded for a document: title and abstract joined by a space.
std::string embedding_text(const Document& doc);

class VectorStore {
 public:
  // Embeds every document of pool in one provider call. Throws on an empty
  // pool or when the provider returns the wrong number of vectors.
  static VectorStore build(std::span<const Document> pool, EmbeddingProvider& provider);
  static VectorStore from_vectors(std::vector<std::string> ids,
                                  std::vector<EmbeddingVector> vectors);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const EmbeddingVector& vector(std::size_t i) const { return vectors_.at(i); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  RankedList rank(const EmbeddingVector& query, std::size_t k) const;

  bool operator==(const VectorStore& other) const {
    return ids_ == other.ids_ && vectors_ == other.vectors_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<EmbeddingVector> vectors_;
  std::size_t dim_ = 0;
  std::vector<std::string> warnings_;
};

RankedList retrieve_topk_dense(std::string_view query, const VectorStore& store,
                               EmbeddingProvider& provider, std::size_t k);

}  // namespace citedisc
