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

#include "citedisc/relation.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <fmt/format.h>

#include "citedisc/errors.hpp"
#include "citedisc/lexical.hpp"
#include "citedisc/prompts.hpp"
#include "text_util.hpp"

namespace citedisc {
namespace {

constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022

// Length of a leading list marker ("-", "*", "+", "•", "3.", "3)", "(3)"),
// or 0. A marker only counts when whitespace and then real content follow.
std::size_t list_marker_length(std::string_view s) {
  std::size_t n = 0;
  if (s.starts_with(kBullet)) {
    n = kBullet.size();
  } else if (!s.empty() && (s[0] == '-' || s[0] == '*' || s[0] == '+')) {
    n = 1;
  } else {
    std::size_t i = 0;
    const bool open = !s.empty() && s[0] == '(';
    if (open) ++i;
    const std::size_t digits_start = i;
    while (i < s.size() && i - digits_start < 3 && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits_start || i >= s.size()) return 0;
    if (open) {
      if (s[i] != ')') return 0;
      n = i + 1;
    } else if (s[i] == '.' || s[i] == ')' || s[i] == ':') {
      n = i + 1;
    } else {
      return 0;
    }
  }
  std::size_t j = n;
  while (j < s.size() && detail::is_space(s[j])) ++j;
  if (j == n || j >= s.size() || s[j] == '|') return 0;
  return j;
}

std::string_view strip_decorations(std::string_view line) {
  while (true) {
    line = detail::trim(line);
    if (const std::size_t m = list_marker_length(line); m > 0) {
      line.remove_prefix(m);
      continue;
    }
    if (line.size() >= 2 && ((line.front() == '(' && line.back() == ')') ||
                             (line.front() == '[' && line.back() == ']'))) {
      line = line.substr(1, line.size() - 2);
      continue;
    }
    return line;
  }
}

std::string excerpt(std::string_view s) {
  std::string out(detail::utf8_prefix(s, 40));
  if (out.size() < s.size()) out += "...";
  return out;
}

}  // namespace

std::string build_extraction_prompt(std::string_view paragraph) {
  if (detail::trim(paragraph).empty()) {
    throw std::invalid_argument("relation extraction needs a non-empty paragraph");
  }
  return fill_template(relation_extraction_template().text, {{"paragraph", paragraph}});
}

ExtractionResult parse_triples(std::string_view raw) {
  ExtractionResult result;
  result.raw_response = std::string(raw);
  if (detail::trim(raw).empty()) {
    result.parse_warnings.push_back("empty response");
    return result;
  }

  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(raw)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string_view body = strip_decorations(line);

    if (std::count(body.begin(), body.end(), '|') != 2) {
      result.parse_warnings.push_back(
          fmt::format("line {}: not a 'subject | predicate | object' line: {}", line_no, excerpt(body)));
      continue;
    }
    const auto first = body.find('|');
    const auto second = body.find('|', first + 1);
    RelationTriple triple{detail::collapse_spaces(body.substr(0, first)),
                          detail::collapse_spaces(body.substr(first + 1, second - first - 1)),
                          detail::collapse_spaces(body.substr(second + 1))};
    if (triple.subject.empty() || triple.predicate.empty() || triple.object.empty()) {
      result.parse_warnings.push_back(
          fmt::format("line {}: triple has an empty field: {}", line_no, excerpt(body)));
      continue;
    }
    if (std::find(result.triples.begin(), result.triples.end(), triple) != result.triples.end()) {
      result.parse_warnings.push_back(fmt::format("line {}: duplicate triple skipped", line_no));
      continue;
    }
    result.triples.push_back(std::move(triple));
  }
  if (result.triples.empty()) result.parse_warnings.push_back("no parseable triples in response");
  return result;
}

std::string render_relation_query(std::span<const RelationTriple> triples) {
  std::string out;
  for (const auto& t : triples) {
    if (!out.empty()) out += ". ";
    out += t.subject;
    out += ' ';
    out += t.predicate;
    out += ' ';
    out += t.object;
  }
  return out;
}

std::string format_triples(std::span<const RelationTriple> triples) {
  std::string out;
  for (const auto& t : triples) out += t.subject + " | " + t.predicate + " | " + t.object + "\n";
  return out;
}

ExtractionResult extract_relations(std::string_view paragraph, LlmGateway& gateway) {
  ChatRequest request;
  request.user_text = build_extraction_prompt(paragraph);
  request.temperature = 0.0;
  const ChatResponse response = gateway.complete(request);
  return parse_triples(response.text);
}

RankedList rank_by_relations(ExtractionResult& extraction, std::string_view paragraph,
                             std::span<const Document> pool, std::size_t k,
                             RelationScorer scorer, EmbeddingProvider* embedder) {
  if (pool.empty()) throw std::invalid_argument("candidate pool is empty");
  if (k == 0) throw std::invalid_argument("k must be at least 1");

  std::string query = render_relation_query(extraction.triples);
  if (extraction.triples.empty()) {
    extraction.parse_warnings.push_back("no triples extracted; ranking by the paragraph text");
    query = std::string(paragraph);
  }
  if (scorer == RelationScorer::kLexical) return retrieve_topk(query, pool, k);

  if (embedder == nullptr) throw ConfigError("dense relation scoring requires an embedder");
  const VectorStore store = VectorStore::build(pool, *embedder);
  return retrieve_topk_dense(query, store, *embedder, k);
}

RelationRetrieval relation_retrieve(std::string_view paragraph, std::span<const Document> pool,
                                    std::size_t k, LlmGateway& gateway, RelationScorer scorer,
                                    EmbeddingProvider* embedder) {
  if (pool.empty()) throw std::invalid_argument("candidate pool is empty");
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  RelationRetrieval out;
  out.extraction = extract_relations(paragraph, gateway);
  out.ranking = rank_by_relations(out.extraction, paragraph, pool, k, scorer, embedder);
  return out;
}

}  // namespace citedisc
