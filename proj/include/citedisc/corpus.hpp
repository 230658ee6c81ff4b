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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace citedisc {

// A candidate abstract. The id is unique within its pool.
struct Document {
  std::string id;
  std::optional<std::string> title;
  std::string abstract;

  bool operator==(const Document&) const = default;
};

struct QueryInstance {
  std::string query_id;
  std::string paragraph;
  std::vector<Document> candidates;
  std::set<std::string> gold_ids;
  // 1-based line in the source file; 0 when built in memory.
  std::size_t source_line = 0;

  std::vector<std::string> candidate_ids() const;

  // Field equality; source_line is bookkeeping and is ignored.
  bool operator==(const QueryInstance& other) const {
    return query_id == other.query_id && paragraph == other.paragraph &&
           candidates == other.candidates && gold_ids == other.gold_ids;
  }
};

struct Dataset {
  std::vector<QueryInstance> instances;

  std::size_t size() const { return instances.size(); }
  bool operator==(const Dataset&) const = default;
};

struct ValidationOptions {
  // gold ids outside the pool are violations rather than warnings.
  bool strict = true;
  // Evaluation needs at least one gold id per instance.
  bool require_gold = true;
};

struct ValidationResult {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

ValidationResult validate_instance(const QueryInstance& instance,
                                   const ValidationOptions& options = {});

struct LoadDiagnostic {
  std::size_t line = 0;
  std::string message;
  bool is_error = true;
};

// Everything that was learned from reading a dataset file, including the
// instances that passed and the per-line diagnostics for those that did not.
struct LoadReport {
  Dataset dataset;
  std::vector<LoadDiagnostic> diagnostics;
  std::size_t record_count = 0;

  bool ok() const;
};

// Reads every line and collects diagnostics instead of stopping at the first
// problem. Throws IoError when the file cannot be opened.
LoadReport scan_dataset(const std::filesystem::path& path,
                        const ValidationOptions& options = {});
LoadReport scan_dataset(std::istream& in, const ValidationOptions& options = {});

// Throws DatasetError for the first error diagnostic.
Dataset load_dataset(const std::filesystem::path& path,
                     const ValidationOptions& options = {});

// Parses one record. Throws DatasetError carrying the line number.
QueryInstance parse_instance(const nlohmann::json& record, std::size_t line);
nlohmann::json instance_to_json(const QueryInstance& instance);

void write_dataset(const Dataset& dataset, std::ostream& out);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace citedisc
