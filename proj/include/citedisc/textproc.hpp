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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace citedisc {

// Lowercase, non-empty tokens without whitespace.
using TokenList = std::vector<std::string>;

struct TokenizeOptions {
  bool remove_stop_words = false;
};

// Case-folds and splits on every code point that is not a Unicode letter or
// digit. Invalid UTF-8 sequences act as separators.
TokenList tokenize(std::string_view text, const TokenizeOptions& options = {});

bool is_stop_word(std::string_view token);

// Term statistics over a set of tokenized documents. Term indices follow the
// lexicographic order of the terms, so they do not depend on document order.
class Vocabulary {
 public:
  // Throws std::invalid_argument on an empty corpus.
  static Vocabulary build(std::span<const TokenList> docs);

  std::optional<std::size_t> index_of(std::string_view term) const;

  // 0 for unknown terms.
  std::size_t document_frequency(std::string_view term) const;
  std::size_t document_frequency(std::size_t index) const { return df_.at(index); }

  const std::string& term(std::size_t index) const { return terms_.at(index); }
  std::size_t size() const { return terms_.size(); }
  std::size_t corpus_size() const { return corpus_size_; }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t corpus_size_ = 0;
};

}  // namespace citedisc
