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

#include "citedisc/evaluation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "citedisc/errors.hpp"

namespace citedisc {

using nlohmann::json;

PerQueryCounts score_query(const std::set<std::string>& predicted,
                           const std::set<std::string>& gold) {
  if (gold.empty()) throw std::invalid_argument("gold set is empty");
  PerQueryCounts c;
  for (const auto& id : predicted) {
    if (gold.contains(id)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = gold.size() - c.tp;
  return c;
}

double f1(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport aggregate(std::span<const PerQueryCounts> counts) {
  if (counts.empty()) throw std::invalid_argument("cannot aggregate zero queries");

  EvalReport report;
  report.per_query.assign(counts.begin(), counts.end());
  report.n_queries = counts.size();

  std::size_t tp = 0, fp = 0, fn = 0;
  double p_sum = 0.0, r_sum = 0.0;
  for (const auto& c : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    p_sum += ratio(c.tp, c.tp + c.fp);
    r_sum += ratio(c.tp, c.tp + c.fn);
    if (c.failed) ++report.n_failed;
  }
  report.micro.precision = ratio(tp, tp + fp);
  report.micro.recall = ratio(tp, tp + fn);
  report.micro.f1 = f1(report.micro.precision, report.micro.recall);

  const double n = static_cast<double>(counts.size());
  report.macro.precision = p_sum / n;
  report.macro.recall = r_sum / n;
  report.macro.f1 = f1(report.macro.precision, report.macro.recall);
  return report;
}

EvalReport evaluate(const Dataset& dataset, std::span<const Prediction> predictions) {
  std::map<std::string_view, const Prediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.query_id, &p);

  std::vector<PerQueryCounts> counts;
  counts.reserve(dataset.size());
  for (const auto& instance : dataset.instances) {
    if (instance.gold_ids.empty()) {
      throw std::invalid_argument("query " + instance.query_id + " has no gold ids to score against");
    }
    auto it = by_id.find(instance.query_id);
    PerQueryCounts c;
    if (it == by_id.end() || it->second->failed) {
      c.fn = instance.gold_ids.size();
      c.failed = true;
    } else {
      c = score_query(it->second->predicted_ids, instance.gold_ids);
    }
    c.query_id = instance.query_id;
    counts.push_back(std::move(c));
  }
  return aggregate(counts);
}

namespace {

json metrics_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

Metrics metrics_from_json(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

}  // namespace

json report_to_json(std::span<const NamedReport> reports) {
  json systems = json::array();
  for (const auto& [name, report] : reports) {
    json per_query = json::array();
    for (const auto& c : report.per_query) {
      per_query.push_back(
          {{"query_id", c.query_id}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"failed", c.failed}});
    }
    systems.push_back({{"name", name},
                       {"micro", metrics_json(report.micro)},
                       {"macro", metrics_json(report.macro)},
                       {"n_queries", report.n_queries},
                       {"n_failed", report.n_failed},
                       {"per_query", std::move(per_query)}});
  }
  return {{"systems", std::move(systems)}};
}

std::vector<NamedReport> report_from_json(const json& j) {
  std::vector<NamedReport> out;
  try {
    for (const auto& s : j.at("systems")) {
      EvalReport r;
      r.micro = metrics_from_json(s.at("micro"));
      r.macro = metrics_from_json(s.at("macro"));
      r.n_queries = s.at("n_queries").get<std::size_t>();
      r.n_failed = s.at("n_failed").get<std::size_t>();
      for (const auto& q : s.at("per_query")) {
        r.per_query.push_back({q.at("query_id").get<std::string>(), q.at("tp").get<std::size_t>(),
                               q.at("fp").get<std::size_t>(), q.at("fn").get<std::size_t>(),
                               q.value("failed", false)});
      }
      out.emplace_back(s.at("name").get<std::string>(), std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return out;
}

std::string render_report(std::span<const NamedReport> reports, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    return report_to_json(reports).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
  }
  std::size_t name_width = std::string_view("System").size();
  for (const auto& [name, _] : reports) name_width = std::max(name_width, name.size());

  std::string out = fmt::format("| {:<{}} | {:>9} | {:>9} | {:>9} |\n", "System", name_width,
                                "Recall", "Precision", "F1 Score");
  out += fmt::format("|{:-<{}}|{:->10}:|{:->10}:|{:->10}:|\n", "", name_width + 2, "", "", "");
  for (const auto& [name, r] : reports) {
    out += fmt::format("| {:<{}} | {:>9.4f} | {:>9.4f} | {:>9.4f} |\n", name, name_width,
                       r.micro.recall, r.micro.precision, r.micro.f1);
  }
  return out;
}

}  // namespace citedisc
