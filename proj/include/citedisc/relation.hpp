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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citedisc/corpus.hpp"
#include "citedisc/dense.hpp"
#include "citedisc/llm_gateway.hpp"
#include "citedisc/ranking.hpp"

namespace citedisc {

inline constexpr std::size_t kMaxTriples = 15;

struct RelationTriple {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const RelationTriple&) const = default;
};

struct ExtractionResult {
  std::vector<RelationTriple> triples;
  std::string raw_response;
  std::vector<std::string> parse_warnings;
};

// Throws std::invalid_argument for a blank paragraph.
std::string build_extraction_prompt(std::string_view paragraph);

// Total: never throws. Lines must hold exactly two '|' separators; list
// markers and wrapping parentheses are stripped, whitespace collapsed, and
// repeated triples dropped.
ExtractionResult parse_triples(std::string_view raw);

// "subject predicate object" per triple, joined by ". ".
std::string render_relation_query(std::span<const RelationTriple> triples);

// One "subject | predicate | object" line per triple; parse_triples reads it
// back unchanged.
std::string format_triples(std::span<const RelationTriple> triples);

enum class RelationScorer { kLexical, kDense };

// Sends the extraction prompt through the gateway and parses the reply.
ExtractionResult extract_relations(std::string_view paragraph, LlmGateway& gateway);

// Ranks pool against the rendered triples, or against the paragraph itself
// when no triple was parsed (a warning is appended to extraction).
RankedList rank_by_relations(ExtractionResult& extraction, std::string_view paragraph,
                             std::span<const Document> pool, std::size_t k,
                             RelationScorer scorer,
                             EmbeddingProvider* embedder = nullptr);

struct RelationRetrieval {
  RankedList ranking;
  ExtractionResult extraction;
};

// Extraction followed by ranking. The dense scorer requires embedder.
RelationRetrieval relation_retrieve(std::string_view paragraph,
                                    std::span<const Document> pool, std::size_t k,
                                    LlmGateway& gateway,
                                    RelationScorer scorer = RelationScorer::kLexical,
                                    EmbeddingProvider* embedder = nullptr);

}  // namespace citedisc
