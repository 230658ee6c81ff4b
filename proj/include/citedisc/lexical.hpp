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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citedisc/corpus.hpp"
#include "citedisc/ranking.hpp"
#include "citedisc/textproc.hpp"

namespace citedisc {

struct SparseEntry {
  std::uint32_t term = 0;
  double weight = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

// Unit-length (or empty) sparse vector with strictly increasing indices.
class SparseVector {
 public:
  SparseVector() = default;

  // Sorts, merges duplicate indices, drops zeros and L2-normalizes. Throws
  // std::invalid_argument on non-finite weights.
  static SparseVector normalized(std::vector<SparseEntry> entries);

  const std::vector<SparseEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double weight_of(std::uint32_t term) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<SparseEntry> entries_;
};

// Cosine similarity of two normalized vectors, i.e. their dot product.
// Zero when either side is empty.
double cosine(const SparseVector& u, const SparseVector& v);

// Smoothed inverse document frequency: ln((1 + n) / (1 + df)) + 1.
double smoothed_idf(std::size_t corpus_size, std::size_t document_frequency);

// TF-IDF index over one candidate pool. Documents are indexed by their
// abstract; weights are raw term counts times smoothed idf, L2-normalized.
class TfIdfIndex {
 public:
  // Throws std::invalid_argument for an empty pool.
  static TfIdfIndex build(std::span<const Document> pool,
                          const TokenizeOptions& options = {});

  // Query-side vector. Out-of-vocabulary terms are dropped.
  SparseVector vectorize(std::string_view text) const;

  RankedList rank(std::string_view query, std::size_t k) const;

  const Vocabulary& vocabulary() const { return vocabulary_; }
  double idf(std::size_t term_index) const { return idf_.at(term_index); }
  std::size_t doc_count() const { return ids_.size(); }
  const std::string& doc_id(std::size_t i) const { return ids_.at(i); }
  const SparseVector& doc_vector(std::size_t i) const { return vectors_.at(i); }
  const SparseVector& doc_vector(std::string_view id) const;

  // Ids of documents whose abstract produced no tokens (zero vectors).
  const std::vector<std::string>& empty_documents() const { return empty_documents_; }

 private:
  SparseVector weigh(const TokenList& tokens) const;

  TokenizeOptions options_;
  Vocabulary vocabulary_;
  std::vector<double> idf_;
  std::vector<std::string> ids_;
  std::vector<SparseVector> vectors_;
  std::vector<std::string> empty_documents_;
};

// Builds an index over pool and returns its k best documents for query.
RankedList retrieve_topk(std::string_view query, std::span<const Document> pool,
                         std::size_t k, const TokenizeOptions& options = {});

}  // namespace citedisc
