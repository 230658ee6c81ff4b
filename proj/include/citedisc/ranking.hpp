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
#include <string>
#include <vector>

namespace citedisc {

struct ScoredId {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

// Candidates ordered by descending score, ties by ascending id.
struct RankedList {
  std::vector<ScoredId> entries;
  std::size_t k = 0;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> ids() const;
  // The first n entries; n is clamped to size().
  RankedList prefix(std::size_t n) const;
};

// Sorts by (score desc, id asc) and keeps the first k. Throws
// std::invalid_argument when k == 0.
RankedList rank_top_k(std::vector<ScoredId> scored, std::size_t k);

}  // namespace citedisc
