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
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "citedisc/corpus.hpp"
#include "citedisc/dense.hpp"
#include "citedisc/llm_gateway.hpp"
#include "citedisc/parallel.hpp"
#include "citedisc/ranking.hpp"
#include "citedisc/relation.hpp"

namespace citedisc {

enum class RetrieverKind { kTfIdf, kDense, kRelation };

std::string_view to_string(RetrieverKind kind);
// Accepts "tfidf", "dense" and "relation". Throws ConfigError otherwise.
RetrieverKind parse_retriever_kind(std::string_view name);

struct RetrieverChoice {
  RetrieverKind kind = RetrieverKind::kRelation;
  std::size_t k = 20;
};

enum class PredictMode { kRetrievalOnly, kPipeline };

struct PredictorOptions {
  PredictMode mode = PredictMode::kPipeline;
  // Keep only the first chosen id.
  bool single = false;
  // Show the extracted triples to the selection stage.
  bool triples_in_prompt = false;
  bool show_scores = false;
  std::size_t abstract_char_budget = 1200;
  RelationScorer relation_scorer = RelationScorer::kLexical;
};

struct CitationPromptOptions {
  std::size_t abstract_char_budget = 1200;
  bool single = false;
  bool show_scores = false;
  // Rendered into the prompt when non-empty.
  std::span<const RelationTriple> triples;
};

struct ScoredDocument {
  const Document* doc = nullptr;
  double score = 0.0;
};

// Throws std::invalid_argument when candidates is empty.
std::string build_citation_prompt(std::string_view paragraph,
                                  std::span<const ScoredDocument> candidates,
                                  const CitationPromptOptions& options = {});

struct CitedIds {
  std::set<std::string> ids;
  std::vector<std::string> warnings;
  bool used_fallback = false;
};

// Pulls id-like tokens out of a free-form reply and keeps the members of
// allowed_ids; anything else is reported as hallucinated. When nothing
// survives, fallback_id is returned. With single, only the first mention
// counts. Never throws.
CitedIds parse_cited_ids(std::string_view raw, const std::set<std::string>& allowed_ids,
                         const std::string& fallback_id, bool single = false);

struct Prediction {
  std::string query_id;
  std::set<std::string> predicted_ids;
  std::vector<std::string> retrieved_ids;
  std::vector<double> retrieved_scores;
  std::optional<ExtractionResult> extraction;
  std::vector<std::string> warnings;
  double retrieval_ms = 0.0;
  double inference_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct PredictorServices {
  LlmGateway* gateway = nullptr;
  EmbeddingProvider* embedder = nullptr;
};

// Stage one retrieves per choice.kind; stage two (pipeline mode) asks the
// gateway to select ids among the retrieved candidates. Backend failures mark
// the prediction failed instead of throwing. Throws ConfigError when a needed
// service is missing.
Prediction predict(const QueryInstance& instance, const RetrieverChoice& choice,
                   const PredictorOptions& options, const PredictorServices& services);

// Full candidate ranking for one instance under kind (stage one only).
struct StageOne {
  RankedList ranking;
  std::optional<ExtractionResult> extraction;
  std::vector<std::string> warnings;
};
StageOne retrieve_stage(const QueryInstance& instance, RetrieverKind kind, std::size_t k,
                        const PredictorOptions& options, const PredictorServices& services);

std::vector<Prediction> predict_all(const Dataset& dataset, const RetrieverChoice& choice,
                                    const PredictorOptions& options,
                                    const PredictorServices& services, std::size_t workers = 1);

// Dump record: {query_id, predicted, retrieved, warnings}, plus `failed` and
// `error` on failed queries.
nlohmann::json prediction_to_json(const Prediction& prediction);
Prediction prediction_from_json(const nlohmann::json& j);
void write_predictions(std::span<const Prediction> predictions, std::ostream& out);
std::vector<Prediction> read_predictions(std::istream& in);

}  // namespace citedisc
