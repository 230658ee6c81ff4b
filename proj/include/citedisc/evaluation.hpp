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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "citedisc/corpus.hpp"
#include "citedisc/predictor.hpp"

namespace citedisc {

struct PerQueryCounts {
  std::string query_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool failed = false;

  bool operator==(const PerQueryCounts&) const = default;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<PerQueryCounts> per_query;
  Metrics micro;
  Metrics macro;
  std::size_t n_queries = 0;
  std::size_t n_failed = 0;
};

// Throws std::invalid_argument when gold is empty.
PerQueryCounts score_query(const std::set<std::string>& predicted,
                           const std::set<std::string>& gold);

// Harmonic mean; 0 when p + r == 0.
double f1(double precision, double recall);

// Micro: P/R from summed counts. Macro: per-query P/R averaged, then f1 of the
// averages. Throws std::invalid_argument on empty input.
EvalReport aggregate(std::span<const PerQueryCounts> counts);

// Scores predictions against gold by query_id. Failed or missing predictions
// count as tp = fp = 0, fn = |gold|.
EvalReport evaluate(const Dataset& dataset, std::span<const Prediction> predictions);

using NamedReport = std::pair<std::string, EvalReport>;

enum class ReportFormat { kTable, kJson };

// Table: one row per report, Recall/Precision/F1 Score to four decimals.
// Json: {"systems": [...]} with metrics and per-query counts.
std::string render_report(std::span<const NamedReport> reports, ReportFormat format);

nlohmann::json report_to_json(std::span<const NamedReport> reports);
std::vector<NamedReport> report_from_json(const nlohmann::json& j);

}  // namespace citedisc
