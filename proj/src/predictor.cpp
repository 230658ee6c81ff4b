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

#include "citedisc/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "citedisc/errors.hpp"
#include "citedisc/lexical.hpp"
#include "citedisc/prompts.hpp"
#include "text_util.hpp"

namespace citedisc {

using nlohmann::json;

std::string_view to_string(RetrieverKind kind) {
  switch (kind) {
    case RetrieverKind::kTfIdf:
      return "tfidf";
    case RetrieverKind::kDense:
      return "dense";
    case RetrieverKind::kRelation:
      return "relation";
  }
  return "unknown";
}

RetrieverKind parse_retriever_kind(std::string_view name) {
  if (name == "tfidf") return RetrieverKind::kTfIdf;
  if (name == "dense") return RetrieverKind::kDense;
  if (name == "relation") return RetrieverKind::kRelation;
  throw ConfigError("unknown retriever \"" + std::string(name) + "\" (expected tfidf, dense or relation)");
}

namespace {

constexpr std::string_view kTruncationMarker = "... [truncated]";
constexpr std::string_view kIdDelimiters = " \t\r\n\f\v,;[](){}\"'`<>|";
constexpr std::string_view kEdgePunctuation = ".:!?*#";

std::string candidate_line(const ScoredDocument& c, const CitationPromptOptions& options) {
  std::string abstract = detail::collapse_spaces(c.doc->abstract);
  if (abstract.size() > options.abstract_char_budget) {
    abstract = std::string(detail::utf8_prefix(abstract, options.abstract_char_budget));
    abstract += kTruncationMarker;
  }
  std::string line = "[" + c.doc->id + "] ";
  if (options.show_scores) line += fmt::format("(score {:.4f}) ", c.score);
  return line + abstract;
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct Mention {
  std::size_t position;
  std::string id;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string build_citation_prompt(std::string_view paragraph,
                                  std::span<const ScoredDocument> candidates,
                                  const CitationPromptOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("citation prompt needs at least one candidate");

  std::string listing;
  for (const auto& c : candidates) {
    if (c.doc == nullptr) throw std::invalid_argument("null candidate document");
    if (!listing.empty()) listing += '\n';
    listing += candidate_line(c, options);
  }

  std::string relations;
  if (!options.triples.empty()) {
    relations = "\nRelations extracted from the paragraph:\n" + format_triples(options.triples);
  }

  const std::string_view instruction =
      options.single
          ? "Identify the one abstract that this paragraph most likely cites. Answer with only "
            "its ID. Output nothing else."
          : "Identify all abstracts that this paragraph cites. Answer with only a comma-separated "
            "list of their IDs, for example: id1, id2. Output nothing else.";

  return fill_template(citation_selection_template().text, {{"paragraph", paragraph},
                                                            {"relations", relations},
                                                            {"candidates", listing},
                                                            {"answer_instruction", instruction}});
}

CitedIds parse_cited_ids(std::string_view raw, const std::set<std::string>& allowed_ids,
                         const std::string& fallback_id, bool single) {
  CitedIds out;
  std::vector<Mention> mentions;
  std::vector<std::string> hallucinated;

  auto note_unknown = [&](std::string_view token) {
    std::string t(token);
    if (std::find(hallucinated.begin(), hallucinated.end(), t) == hallucinated.end()) {
      hallucinated.push_back(std::move(t));
    }
  };

  std::size_t i = 0;
  while (i < raw.size()) {
    if (kIdDelimiters.find(raw[i]) != std::string_view::npos) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < raw.size() && kIdDelimiters.find(raw[i]) == std::string_view::npos) ++i;
    std::string_view token = raw.substr(start, i - start);
    const bool bracketed = start > 0 && raw[start - 1] == '[' && i < raw.size() && raw[i] == ']';

    if (allowed_ids.contains(std::string(token))) {
      mentions.push_back({start, std::string(token)});
      continue;
    }
    std::string_view stripped = token;
    while (!stripped.empty() && kEdgePunctuation.find(stripped.front()) != std::string_view::npos) {
      stripped.remove_prefix(1);
    }
    while (!stripped.empty() && kEdgePunctuation.find(stripped.back()) != std::string_view::npos) {
      stripped.remove_suffix(1);
    }
    if (!stripped.empty() && allowed_ids.contains(std::string(stripped))) {
      mentions.push_back({start, std::string(stripped)});
    } else if (!stripped.empty() && (bracketed || has_digit(stripped))) {
      note_unknown(stripped);
    }
  }

  // Ids that contain delimiter characters can still be named inside brackets.
  for (std::size_t open = raw.find('['); open != std::string_view::npos;
       open = raw.find('[', open + 1)) {
    const std::size_t close = raw.find(']', open + 1);
    if (close == std::string_view::npos) break;
    const std::string inner(detail::trim(raw.substr(open + 1, close - open - 1)));
    if (inner.find_first_of(kIdDelimiters) != std::string::npos && allowed_ids.contains(inner)) {
      mentions.push_back({open, inner});
    }
  }

  std::stable_sort(mentions.begin(), mentions.end(),
                   [](const Mention& a, const Mention& b) { return a.position < b.position; });
  for (const auto& m : mentions) {
    out.ids.insert(m.id);
    if (single) break;
  }

  if (!hallucinated.empty()) {
    std::string list;
    for (const auto& h : hallucinated) {
      if (!list.empty()) list += ", ";
      list += std::string(detail::utf8_prefix(h, 64));
    }
    out.warnings.push_back("dropped ids not among the candidates: " + list);
  }

  if (out.ids.empty()) {
    std::string fallback = fallback_id;
    if (fallback.empty() && !allowed_ids.empty()) fallback = *allowed_ids.begin();
    if (fallback.empty()) {
      out.warnings.push_back("no valid id in response and no fallback available");
      return out;
    }
    out.ids.insert(fallback);
    out.used_fallback = true;
    out.warnings.push_back("no valid id in response; fell back to top-ranked candidate " + fallback);
  }
  return out;
}

StageOne retrieve_stage(const QueryInstance& instance, RetrieverKind kind, std::size_t k,
                        const PredictorOptions& options, const PredictorServices& services) {
  StageOne stage;
  switch (kind) {
    case RetrieverKind::kTfIdf:
      stage.ranking = retrieve_topk(instance.paragraph, instance.candidates, k);
      break;
    case RetrieverKind::kDense: {
      if (services.embedder == nullptr) throw ConfigError("dense retrieval requires an embedder");
      const VectorStore store = VectorStore::build(instance.candidates, *services.embedder);
      for (const auto& w : store.warnings()) stage.warnings.push_back("embedding: " + w);
      stage.ranking = retrieve_topk_dense(instance.paragraph, store, *services.embedder, k);
      break;
    }
    case RetrieverKind::kRelation: {
      if (services.gateway == nullptr) throw ConfigError("relation retrieval requires an LLM gateway");
      RelationRetrieval r = relation_retrieve(instance.paragraph, instance.candidates, k,
                                              *services.gateway, options.relation_scorer,
                                              services.embedder);
      for (const auto& w : r.extraction.parse_warnings) stage.warnings.push_back("extraction: " + w);
      stage.ranking = std::move(r.ranking);
      stage.extraction = std::move(r.extraction);
      break;
    }
  }
  return stage;
}

Prediction predict(const QueryInstance& instance, const RetrieverChoice& choice,
                   const PredictorOptions& options, const PredictorServices& services) {
  if (choice.k == 0) throw ConfigError("k must be at least 1");
  if (options.mode == PredictMode::kPipeline && services.gateway == nullptr) {
    throw ConfigError("pipeline mode requires an LLM gateway");
  }

  Prediction p;
  p.query_id = instance.query_id;
  try {
    const auto start = std::chrono::steady_clock::now();
    StageOne stage = retrieve_stage(instance, choice.kind, choice.k, options, services);
    p.retrieval_ms = elapsed_ms(start);
    p.retrieved_ids = stage.ranking.ids();
    for (const auto& e : stage.ranking.entries) p.retrieved_scores.push_back(e.score);
    p.extraction = std::move(stage.extraction);
    p.warnings = std::move(stage.warnings);

    if (options.mode == PredictMode::kRetrievalOnly) {
      p.predicted_ids.insert(p.retrieved_ids.begin(), p.retrieved_ids.end());
      return p;
    }

    const auto infer_start = std::chrono::steady_clock::now();
    std::map<std::string_view, const Document*> by_id;
    for (const auto& doc : instance.candidates) by_id.emplace(doc.id, &doc);
    std::vector<ScoredDocument> shown;
    for (const auto& e : stage.ranking.entries) shown.push_back({by_id.at(e.id), e.score});

    CitationPromptOptions prompt_options;
    prompt_options.abstract_char_budget = options.abstract_char_budget;
    prompt_options.single = options.single;
    prompt_options.show_scores = options.show_scores;
    if (options.triples_in_prompt && p.extraction) prompt_options.triples = p.extraction->triples;

    ChatRequest request;
    request.user_text = build_citation_prompt(instance.paragraph, shown, prompt_options);
    const ChatResponse response = services.gateway->complete(request);

    const std::set<std::string> allowed(p.retrieved_ids.begin(), p.retrieved_ids.end());
    CitedIds cited = parse_cited_ids(response.text, allowed, p.retrieved_ids.front(), options.single);
    p.predicted_ids = std::move(cited.ids);
    for (auto& w : cited.warnings) p.warnings.push_back("selection: " + w);
    p.inference_ms = elapsed_ms(infer_start);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    p.failed = true;
    p.error = e.what();
    p.predicted_ids.clear();
  }
  return p;
}

std::vector<Prediction> predict_all(const Dataset& dataset, const RetrieverChoice& choice,
                                    const PredictorOptions& options,
                                    const PredictorServices& services, std::size_t workers) {
  std::vector<Prediction> out(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t i) {
    out[i] = predict(dataset.instances[i], choice, options, services);
  });
  return out;
}

json prediction_to_json(const Prediction& p) {
  json j;
  j["query_id"] = p.query_id;
  j["predicted"] = p.predicted_ids;
  j["retrieved"] = p.retrieved_ids;
  j["warnings"] = p.warnings;
  if (p.failed) {
    j["failed"] = true;
    j["error"] = p.error;
  }
  return j;
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  try {
    p.query_id = j.at("query_id").get<std::string>();
    for (const auto& id : j.at("predicted")) p.predicted_ids.insert(id.get<std::string>());
    p.retrieved_ids = j.at("retrieved").get<std::vector<std::string>>();
    p.warnings = j.value("warnings", std::vector<std::string>{});
    p.failed = j.value("failed", false);
    p.error = j.value("error", "");
  } catch (const json::exception& e) {
    throw Error(std::string("malformed prediction record: ") + e.what());
  }
  return p;
}

void write_predictions(std::span<const Prediction> predictions, std::ostream& out) {
  for (const auto& p : predictions) {
    out << prediction_to_json(p).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(prediction_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(fmt::format("prediction dump line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace citedisc
