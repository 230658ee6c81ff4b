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

#include "citedisc/textproc.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace citedisc {
namespace {

constexpr std::array<std::string_view, 64> kStopWords = {
    "a",     "about", "after", "all",   "also",  "an",    "and",   "are",
    "as",    "at",    "be",    "been",  "but",   "by",    "can",   "could",
    "for",   "from",  "had",   "has",   "have",  "he",    "her",   "his",
    "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",
    "may",   "more",  "most",  "not",   "of",    "on",    "or",    "our",
    "she",   "so",    "such",  "than",  "that",  "the",   "their", "them",
    "then",  "there", "these", "they",  "this",  "those", "to",    "was",
    "we",    "were",  "what",  "which", "while", "who",   "will",  "with",
};

}  // namespace

bool is_stop_word(std::string_view token) {
  return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
}

TokenList tokenize(std::string_view text, const TokenizeOptions& options) {
  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!options.remove_stop_words || !is_stop_word(current)) {
      tokens.push_back(std::move(current));
    }
    current.clear();
  };

  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0 || !u_isalnum(c)) {
      flush();
      continue;
    }
    UChar32 folded = u_foldCase(c, U_FOLD_CASE_DEFAULT);
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, folded);
    current.append(buf, static_cast<std::size_t>(n));
  }
  flush();
  return tokens;
}

Vocabulary Vocabulary::build(std::span<const TokenList> docs) {
  if (docs.empty()) throw std::invalid_argument("vocabulary needs at least one document");

  Vocabulary vocab;
  vocab.corpus_size_ = docs.size();

  std::unordered_set<std::string> all_terms;
  for (const auto& doc : docs) all_terms.insert(doc.begin(), doc.end());
  vocab.terms_.assign(all_terms.begin(), all_terms.end());
  std::sort(vocab.terms_.begin(), vocab.terms_.end());
  vocab.df_.assign(vocab.terms_.size(), 0);

  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto term : seen) ++vocab.df_[*vocab.index_of(term)];
  }
  return vocab;
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms_.begin());
}

std::size_t Vocabulary::document_frequency(std::string_view term) const {
  auto index = index_of(term);
  return index ? df_[*index] : 0;
}

}  // namespace citedisc
