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

#include "citedisc/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "citedisc/errors.hpp"
#include "text_util.hpp"

namespace citedisc {

using nlohmann::json;

std::vector<std::string> QueryInstance::candidate_ids() const {
  std::vector<std::string> ids;
  ids.reserve(candidates.size());
  for (const auto& doc : candidates) ids.push_back(doc.id);
  return ids;
}

ValidationResult validate_instance(const QueryInstance& instance,
                                   const ValidationOptions& options) {
  ValidationResult result;
  auto& v = result.violations;
  const std::string& qid = instance.query_id;

  if (qid.empty()) v.push_back("query_id is empty");
  if (detail::trim(instance.paragraph).empty()) v.push_back("query " + qid + ": paragraph is empty");
  if (instance.candidates.empty()) v.push_back("query " + qid + ": candidate pool is empty");

  std::unordered_set<std::string_view> ids;
  for (const auto& doc : instance.candidates) {
    if (doc.id.empty()) {
      v.push_back("query " + qid + ": candidate with empty id");
      continue;
    }
    if (!ids.insert(doc.id).second) {
      v.push_back("query " + qid + ": duplicate candidate id \"" + doc.id + "\"");
    }
    if (detail::trim(doc.abstract).empty()) {
      v.push_back("query " + qid + ": candidate \"" + doc.id + "\" has an empty abstract");
    }
  }

  if (options.require_gold && instance.gold_ids.empty()) {
    v.push_back("query " + qid + ": gold set is empty");
  }
  for (const auto& gold : instance.gold_ids) {
    if (ids.count(gold) != 0) continue;
    std::string message = "query " + qid + ": gold id \"" + gold + "\" is not in the candidate pool";
    if (options.strict) {
      v.push_back(std::move(message));
    } else {
      result.warnings.push_back(std::move(message));
    }
  }
  return result;
}

namespace {

const json& require_field(const json& object, const char* name, std::size_t line,
                          const std::string& prefix = {}) {
  auto it = object.find(name);
  if (it == object.end()) throw DatasetError(line, "missing field \"" + prefix + name + "\"");
  return *it;
}

std::string require_string(const json& value, const std::string& field, std::size_t line) {
  if (!value.is_string()) throw DatasetError(line, "field \"" + field + "\" must be a string");
  return value.get<std::string>();
}

}  // namespace

QueryInstance parse_instance(const json& record, std::size_t line) {
  if (!record.is_object()) throw DatasetError(line, "record is not a JSON object");

  QueryInstance instance;
  instance.source_line = line;
  instance.query_id = require_string(require_field(record, "query_id", line), "query_id", line);
  instance.paragraph = require_string(require_field(record, "paragraph", line), "paragraph", line);

  const json& candidates = require_field(record, "candidates", line);
  if (!candidates.is_array()) throw DatasetError(line, "field \"candidates\" must be an array");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const json& c = candidates[i];
    const std::string where = "candidates[" + std::to_string(i) + "]";
    if (!c.is_object()) throw DatasetError(line, "field \"" + where + "\" must be an object");
    Document doc;
    doc.id = require_string(require_field(c, "id", line, where + "."), where + ".id", line);
    if (auto t = c.find("title"); t != c.end() && !t->is_null()) {
      doc.title = require_string(*t, where + ".title", line);
    }
    doc.abstract = require_string(require_field(c, "abstract", line, where + "."), where + ".abstract", line);
    instance.candidates.push_back(std::move(doc));
  }

  if (auto g = record.find("gold"); g != record.end() && !g->is_null()) {
    if (!g->is_array()) throw DatasetError(line, "field \"gold\" must be an array of strings");
    for (std::size_t i = 0; i < g->size(); ++i) {
      instance.gold_ids.insert(
          require_string((*g)[i], "gold[" + std::to_string(i) + "]", line));
    }
  }
  return instance;
}

json instance_to_json(const QueryInstance& instance) {
  json candidates = json::array();
  for (const auto& doc : instance.candidates) {
    json c = {{"id", doc.id}};
    if (doc.title) c["title"] = *doc.title;
    c["abstract"] = doc.abstract;
    candidates.push_back(std::move(c));
  }
  json record;
  record["query_id"] = instance.query_id;
  record["paragraph"] = instance.paragraph;
  record["candidates"] = std::move(candidates);
  record["gold"] = instance.gold_ids;
  return record;
}

bool LoadReport::ok() const {
  for (const auto& d : diagnostics) {
    if (d.is_error) return false;
  }
  return true;
}

LoadReport scan_dataset(std::istream& in, const ValidationOptions& options) {
  LoadReport report;
  std::unordered_set<std::string> query_ids;
  std::string text;
  std::size_t line = 0;

  while (std::getline(in, text)) {
    ++line;
    if (detail::trim(text).empty()) continue;
    ++report.record_count;

    QueryInstance instance;
    try {
      instance = parse_instance(json::parse(text), line);
    } catch (const json::parse_error& e) {
      report.diagnostics.push_back({line, std::string("malformed JSON: ") + e.what(), true});
      continue;
    } catch (const DatasetError& e) {
      report.diagnostics.push_back({line, e.what(), true});
      continue;
    }

    ValidationResult check = validate_instance(instance, options);
    for (auto& w : check.warnings) {
      report.diagnostics.push_back({line, "line " + std::to_string(line) + ": " + w, false});
    }
    bool bad = !check.ok();
    for (auto& message : check.violations) {
      report.diagnostics.push_back({line, "line " + std::to_string(line) + ": " + message, true});
    }
    if (!instance.query_id.empty() && !query_ids.insert(instance.query_id).second) {
      report.diagnostics.push_back(
          {line, "line " + std::to_string(line) + ": duplicate query_id \"" + instance.query_id + "\"",
           true});
      bad = true;
    }
    if (!bad) report.dataset.instances.push_back(std::move(instance));
  }
  return report;
}

LoadReport scan_dataset(const std::filesystem::path& path, const ValidationOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return scan_dataset(in, options);
}

Dataset load_dataset(const std::filesystem::path& path, const ValidationOptions& options) {
  LoadReport report = scan_dataset(path, options);
  for (const auto& d : report.diagnostics) {
    if (!d.is_error) continue;
    // Messages from scan_dataset already carry the "line N: " prefix.
    std::string message = d.message;
    const std::string prefix = "line " + std::to_string(d.line) + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    throw DatasetError(d.line, message);
  }
  return std::move(report.dataset);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& instance : dataset.instances) {
    out << instance_to_json(instance).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_dataset(dataset, out);
}

}  // namespace citedisc
