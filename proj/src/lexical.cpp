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

#include "citedisc/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace citedisc {

SparseVector SparseVector::normalized(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.term < b.term; });
  SparseVector v;
  for (const auto& e : entries) {
    if (!std::isfinite(e.weight)) throw std::invalid_argument("non-finite sparse weight");
    if (!v.entries_.empty() && v.entries_.back().term == e.term) {
      v.entries_.back().weight += e.weight;
    } else {
      v.entries_.push_back(e);
    }
  }
  std::erase_if(v.entries_, [](const SparseEntry& e) { return e.weight == 0.0; });

  double sq = 0.0;
  for (const auto& e : v.entries_) sq += e.weight * e.weight;
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (auto& e : v.entries_) e.weight /= norm;
  }
  return v;
}

double SparseVector::weight_of(std::uint32_t term) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                             [](const SparseEntry& e, std::uint32_t t) { return e.term < t; });
  return (it != entries_.end() && it->term == term) ? it->weight : 0.0;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  const auto& a = u.entries();
  const auto& b = v.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].term < b[j].term) {
      ++i;
    } else if (b[j].term < a[i].term) {
      ++j;
    } else {
      sum += a[i].weight * b[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

double smoothed_idf(std::size_t corpus_size, std::size_t document_frequency) {
  return std::log((1.0 + static_cast<double>(corpus_size)) /
                  (1.0 + static_cast<double>(document_frequency))) +
         1.0;
}

TfIdfIndex TfIdfIndex::build(std::span<const Document> pool, const TokenizeOptions& options) {
  if (pool.empty()) throw std::invalid_argument("cannot index an empty pool");

  std::vector<TokenList> docs;
  docs.reserve(pool.size());
  for (const auto& doc : pool) docs.push_back(tokenize(doc.abstract, options));

  TfIdfIndex index;
  index.options_ = options;
  index.vocabulary_ = Vocabulary::build(docs);
  index.idf_.resize(index.vocabulary_.size());
  for (std::size_t t = 0; t < index.idf_.size(); ++t) {
    index.idf_[t] = smoothed_idf(pool.size(), index.vocabulary_.document_frequency(t));
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    index.ids_.push_back(pool[i].id);
    index.vectors_.push_back(index.weigh(docs[i]));
    if (index.vectors_.back().empty()) index.empty_documents_.push_back(pool[i].id);
  }
  return index;
}

SparseVector TfIdfIndex::weigh(const TokenList& tokens) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokens) {
    if (auto t = vocabulary_.index_of(token)) counts[static_cast<std::uint32_t>(*t)] += 1.0;
  }
  std::vector<SparseEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [term, count] : counts) entries.push_back({term, count * idf_[term]});
  return SparseVector::normalized(std::move(entries));
}

SparseVector TfIdfIndex::vectorize(std::string_view text) const {
  return weigh(tokenize(text, options_));
}

const SparseVector& TfIdfIndex::doc_vector(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw std::out_of_range("unknown document id " + std::string(id));
  return vectors_[static_cast<std::size_t>(it - ids_.begin())];
}

RankedList TfIdfIndex::rank(std::string_view query, std::size_t k) const {
  const SparseVector q = vectorize(query);
  std::vector<ScoredId> scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) scored.push_back({ids_[i], cosine(q, vectors_[i])});
  return rank_top_k(std::move(scored), k);
}

RankedList retrieve_topk(std::string_view query, std::span<const Document> pool, std::size_t k,
                         const TokenizeOptions& options) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  return TfIdfIndex::build(pool, options).rank(query, k);
}

}  // namespace citedisc
