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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "citedisc/corpus.hpp"
#include "citedisc/errors.hpp"
#include "synthetic.hpp"

using namespace citedisc;

namespace {

const char* kValidLine =
    R"({"query_id":"q1","paragraph":"Dense retrievers encode text.","candidates":[)"
    R"({"id":"c1","title":"BM25","abstract":"Probabilistic ranking."},)"
    R"({"id":"c2","abstract":"Dense passage retrieval with bi-encoders."},)"
    R"({"id":"c3","abstract":"Graph reasoning for documents."}],"gold":["c2"]})";

LoadReport scan_text(const std::string& text, ValidationOptions options = {}) {
  std::istringstream in(text);
  return scan_dataset(in, options);
}

QueryInstance small_instance() {
  QueryInstance q;
  q.query_id = "q";
  q.paragraph = "text";
  q.candidates = {{"c1", std::nullopt, "one"}, {"c2", "T", "two"}};
  q.gold_ids = {"c1"};
  return q;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("citedisc_corpus_" + name);
}

}  // namespace

TEST_CASE("a minimal well-formed record loads") {
  auto report = scan_text(std::string(kValidLine) + "\n");
  REQUIRE(report.ok());
  REQUIRE(report.dataset.size() == 1);
  const auto& q = report.dataset.instances[0];
  CHECK(q.query_id == "q1");
  CHECK(q.candidates.size() == 3);
  CHECK(q.candidates[0].title == "BM25");
  CHECK_FALSE(q.candidates[1].title.has_value());
  CHECK(q.gold_ids == std::set<std::string>{"c2"});
  CHECK(q.source_line == 1);
}

TEST_CASE("gold id outside the pool names query, id and line") {
  std::string bad = kValidLine;
  bad.replace(bad.find(R"(["c2"])"), 6, R"(["c9"])");
  auto path = temp_file("gold.jsonl");
  {
    std::ofstream out(path);
    out << "\n" << bad << "\n";
  }
  try {
    (void)load_dataset(path);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    const std::string what = e.what();
    CHECK(e.line() == 2);
    CHECK(what.find("q1") != std::string::npos);
    CHECK(what.find("c9") != std::string::npos);
    CHECK(what.find("line 2") != std::string::npos);
  }
  // Lenient loading keeps the instance and reports a warning.
  auto lenient = load_dataset(path, {.strict = false});
  CHECK(lenient.size() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("malformed lines report line number and field") {
  auto report = scan_text(std::string(kValidLine) + "\n{not json}\n" +
                          R"({"query_id":"q2","paragraph":"p","candidates":[{"id":"a"}]})" + "\n" +
                          R"({"query_id":7})" + "\n");
  CHECK_FALSE(report.ok());
  CHECK(report.record_count == 4);
  CHECK(report.dataset.size() == 1);
  REQUIRE(report.diagnostics.size() == 3);
  CHECK(report.diagnostics[0].line == 2);
  CHECK(report.diagnostics[1].line == 3);
  CHECK(report.diagnostics[1].message.find("candidates[0].abstract") != std::string::npos);
  CHECK(report.diagnostics[2].message.find("query_id") != std::string::npos);
}

TEST_CASE("duplicate query ids and candidate ids are errors") {
  auto twice = scan_text(std::string(kValidLine) + "\n" + kValidLine + "\n");
  CHECK_FALSE(twice.ok());
  CHECK(twice.dataset.size() == 1);
  CHECK(twice.diagnostics.back().message.find("duplicate query_id") != std::string::npos);

  std::string dup = kValidLine;
  dup.replace(dup.find(R"("id":"c3")"), 9, R"("id":"c1")");
  auto report = scan_text(dup);
  CHECK_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("\"c1\"") != std::string::npos);
}

TEST_CASE("validate_instance rules") {
  SUBCASE("valid instance has no findings") {
    auto r = validate_instance(small_instance());
    CHECK(r.violations.empty());
    CHECK(r.warnings.empty());
  }
  SUBCASE("duplicate candidate id") {
    auto q = small_instance();
    q.candidates[1].id = "c1";
    auto r = validate_instance(q);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].find("c1") != std::string::npos);
  }
  SUBCASE("gold outside pool is a warning when not strict") {
    auto q = small_instance();
    q.gold_ids = {"c1", "c7"};
    auto lenient = validate_instance(q, {.strict = false});
    CHECK(lenient.violations.empty());
    CHECK(lenient.warnings.size() == 1);
    auto strict = validate_instance(q, {.strict = true});
    CHECK(strict.violations.size() == 1);
    CHECK(strict.warnings.empty());
  }
  SUBCASE("empty gold only matters in evaluation mode") {
    auto q = small_instance();
    q.gold_ids.clear();
    CHECK(validate_instance(q).violations.size() == 1);
    CHECK(validate_instance(q, {.strict = true, .require_gold = false}).ok());
  }
  SUBCASE("blank abstract and paragraph") {
    auto q = small_instance();
    q.paragraph = " \n";
    q.candidates[0].abstract = "\t";
    CHECK(validate_instance(q).violations.size() == 2);
  }
  SUBCASE("empty pool") {
    auto q = small_instance();
    q.candidates.clear();
    q.gold_ids.clear();
    CHECK(validate_instance(q, {.strict = true, .require_gold = false}).violations.size() == 1);
  }
}

TEST_CASE("write then load reproduces the dataset") {
  for (std::uint64_t seed : {1, 2, 3}) {
    testing::SyntheticOptions o;
    o.instances = 25;
    o.titles = true;
    o.seed = seed;
    Dataset d = testing::make_synthetic_dataset(o);
    d.instances[0].paragraph = "Unicode — “quotes” \\ and \"escapes\"\ttab";
    d.instances[1].candidates[0].title = "";

    std::stringstream buffer;
    write_dataset(d, buffer);
    auto report = scan_dataset(buffer);
    REQUIRE(report.ok());
    CHECK(report.dataset == d);
    CHECK(report.record_count == d.size());
  }
}

TEST_CASE("1000 records load as 1000 instances") {
  testing::SyntheticOptions o;
  o.instances = 1000;
  o.pool_size = 5;
  auto path = temp_file("thousand.jsonl");
  write_dataset(testing::make_synthetic_dataset(o), path);
  CHECK(load_dataset(path).size() == 1000);
  std::filesystem::remove(path);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/citedisc.jsonl"), IoError);
}
