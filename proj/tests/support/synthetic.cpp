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

#include "synthetic.hpp"

#include <algorithm>
#include <numeric>

namespace citedisc::testing {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::size_t below(std::uint64_t& state, std::size_t n) { return splitmix64(state) % n; }

std::string filler_word(std::uint64_t& state, std::size_t vocabulary) {
  return "w" + std::to_string(below(state, vocabulary));
}

}  // namespace

std::string random_text(std::uint64_t& state, std::size_t words, std::size_t vocabulary) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += filler_word(state, vocabulary);
  }
  return out;
}

Dataset make_synthetic_dataset(const SyntheticOptions& o) {
  std::uint64_t state = o.seed;
  Dataset dataset;
  for (std::size_t q = 0; q < o.instances; ++q) {
    QueryInstance instance;
    instance.query_id = "q" + std::to_string(q);

    std::vector<std::size_t> order(o.pool_size);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[below(state, i)]);
    const std::size_t n_gold = 1 + below(state, std::max<std::size_t>(o.max_gold, 1));

    std::vector<std::string> paragraph_words;
    for (std::size_t i = 0; i < o.paragraph_filler; ++i) {
      paragraph_words.push_back(filler_word(state, o.filler_vocabulary));
    }
    for (std::size_t d = 0; d < o.pool_size; ++d) {
      Document doc;
      doc.id = "c" + std::to_string(d);
      const bool gold =
          std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_gold), d) !=
          order.begin() + static_cast<std::ptrdiff_t>(n_gold);
      std::vector<std::string> words;
      const std::size_t sig = gold ? o.signature_terms : 0;
      for (std::size_t i = sig; i < o.abstract_length; ++i) {
        words.push_back(filler_word(state, o.filler_vocabulary));
      }
      for (std::size_t t = 0; t < sig; ++t) {
        const std::string term = "zq" + std::to_string(q) + "d" + std::to_string(d) + "t" + std::to_string(t);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(below(state, words.size() + 1)), term);
        paragraph_words.insert(
            paragraph_words.begin() + static_cast<std::ptrdiff_t>(below(state, paragraph_words.size() + 1)),
            term);
      }
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) doc.abstract += ' ';
        doc.abstract += words[i];
      }
      if (o.titles && d % 2 == 0) doc.title = "Study " + std::to_string(d);
      if (gold) instance.gold_ids.insert(doc.id);
      instance.candidates.push_back(std::move(doc));
    }
    for (std::size_t i = 0; i < paragraph_words.size(); ++i) {
      if (i) instance.paragraph += ' ';
      instance.paragraph += paragraph_words[i];
    }
    dataset.instances.push_back(std::move(instance));
  }
  return dataset;
}

}  // namespace citedisc::testing
