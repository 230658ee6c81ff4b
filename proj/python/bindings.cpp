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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include <json.hpp>

#include "citedisc/cli.hpp"
#include "citedisc/corpus.hpp"
#include "citedisc/dense.hpp"
#include "citedisc/errors.hpp"
#include "citedisc/evaluation.hpp"
#include "citedisc/lexical.hpp"
#include "citedisc/llm_gateway.hpp"
#include "citedisc/predictor.hpp"
#include "citedisc/relation.hpp"
#include "citedisc/textproc.hpp"

namespace py = pybind11;
using namespace citedisc;
using nlohmann::json;

namespace {

using Ranked = std::vector<std::pair<std::string, double>>;

Ranked to_pairs(const RankedList& list) {
  Ranked out;
  for (const auto& e : list.entries) out.emplace_back(e.id, e.score);
  return out;
}

using TripleTuple = std::tuple<std::string, std::string, std::string>;

std::vector<TripleTuple> to_tuples(const std::vector<RelationTriple>& triples) {
  std::vector<TripleTuple> out;
  for (const auto& t : triples) out.emplace_back(t.subject, t.predicate, t.object);
  return out;
}

std::vector<RelationTriple> from_tuples(const std::vector<TripleTuple>& tuples) {
  std::vector<RelationTriple> out;
  for (const auto& [s, p, o] : tuples) out.push_back({s, p, o});
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "citedisc core: retrieval, relation extraction, LLM selection and evaluation";
  m.attr("__version__") = "0.1.0";

  auto& error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DatasetError>(m, "DatasetError", error.ptr());
  py::register_exception<TransportError>(m, "TransportError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  py::class_<Document>(m, "Document")
      .def(py::init([](std::string id, std::string abstract, std::optional<std::string> title) {
             return Document{std::move(id), std::move(title), std::move(abstract)};
           }),
           py::arg("id"), py::arg("abstract"), py::arg("title") = py::none())
      .def_readwrite("id", &Document::id)
      .def_readwrite("title", &Document::title)
      .def_readwrite("abstract", &Document::abstract)
      .def("__eq__", [](const Document& a, const Document& b) { return a == b; })
      .def("__repr__", [](const Document& d) { return "Document(id='" + d.id + "')"; });

  py::class_<QueryInstance>(m, "QueryInstance")
      .def(py::init([](std::string query_id, std::string paragraph, std::vector<Document> candidates,
                       std::set<std::string> gold_ids) {
             QueryInstance q;
             q.query_id = std::move(query_id);
             q.paragraph = std::move(paragraph);
             q.candidates = std::move(candidates);
             q.gold_ids = std::move(gold_ids);
             return q;
           }),
           py::arg("query_id"), py::arg("paragraph"), py::arg("candidates"),
           py::arg("gold_ids") = std::set<std::string>{})
      .def_readwrite("query_id", &QueryInstance::query_id)
      .def_readwrite("paragraph", &QueryInstance::paragraph)
      .def_readwrite("candidates", &QueryInstance::candidates)
      .def_readwrite("gold_ids", &QueryInstance::gold_ids)
      .def("__repr__", [](const QueryInstance& q) {
        return "QueryInstance(query_id='" + q.query_id + "', candidates=" +
               std::to_string(q.candidates.size()) + ")";
      });

  m.def(
      "tokenize",
      [](std::string_view text, bool remove_stop_words) {
        TokenizeOptions o;
        o.remove_stop_words = remove_stop_words;
        return tokenize(text, o);
      },
      py::arg("text"), py::arg("remove_stop_words") = false);

  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, bool strict) {
        ValidationOptions o;
        o.strict = strict;
        return load_dataset(path, o).instances;
      },
      py::arg("path"), py::arg("strict") = true);

  m.def(
      "write_dataset",
      [](const std::vector<QueryInstance>& instances, const std::filesystem::path& path) {
        write_dataset(Dataset{instances}, path);
      },
      py::arg("instances"), py::arg("path"));

  m.def(
      "retrieve_topk",
      [](std::string_view query, const std::vector<Document>& pool, std::size_t k) {
        return to_pairs(retrieve_topk(query, pool, k));
      },
      py::arg("query"), py::arg("pool"), py::arg("k"),
      "TF-IDF/cosine ranking of pool abstracts; returns (id, score) pairs.");

  m.def(
      "dense_retrieve_topk",
      [](std::string_view query, const std::vector<Document>& pool, std::size_t k, std::size_t dim) {
        EmbeddingProviderConfig c;
        c.dim = dim;
        EmbeddingProvider provider(c);
        const auto store = VectorStore::build(pool, provider);
        return to_pairs(retrieve_topk_dense(query, store, provider, k));
      },
      py::arg("query"), py::arg("pool"), py::arg("k"), py::arg("dim") = 256,
      "Ranking with the hashed mock embedder.");

  m.def(
      "hashed_embedding",
      [](std::string_view text, std::size_t dim) { return hashed_embedding(text, dim).values(); },
      py::arg("text"), py::arg("dim") = 256);

  m.def("build_extraction_prompt", &build_extraction_prompt, py::arg("paragraph"));

  m.def(
      "parse_triples",
      [](std::string_view raw) {
        auto r = parse_triples(raw);
        return py::make_tuple(to_tuples(r.triples), r.parse_warnings);
      },
      py::arg("raw"), "Returns (triples, warnings); triples are (subject, predicate, object).");

  m.def(
      "render_relation_query",
      [](const std::vector<TripleTuple>& triples) {
        return render_relation_query(from_tuples(triples));
      },
      py::arg("triples"));

  m.def(
      "build_citation_prompt",
      [](std::string_view paragraph, const std::vector<Document>& candidates,
         std::size_t abstract_char_budget, bool single) {
        std::vector<ScoredDocument> scored;
        for (const auto& d : candidates) scored.push_back({&d, 0.0});
        CitationPromptOptions o;
        o.abstract_char_budget = abstract_char_budget;
        o.single = single;
        return build_citation_prompt(paragraph, scored, o);
      },
      py::arg("paragraph"), py::arg("candidates"), py::arg("abstract_char_budget") = 1200,
      py::arg("single") = false);

  m.def(
      "parse_cited_ids",
      [](std::string_view raw, const std::set<std::string>& allowed, const std::string& fallback,
         bool single) {
        auto r = parse_cited_ids(raw, allowed, fallback, single);
        return py::make_tuple(r.ids, r.warnings);
      },
      py::arg("raw"), py::arg("allowed"), py::arg("fallback"), py::arg("single") = false);

  m.def(
      "score_query",
      [](const std::set<std::string>& predicted, const std::set<std::string>& gold) {
        auto c = score_query(predicted, gold);
        return py::make_tuple(c.tp, c.fp, c.fn);
      },
      py::arg("predicted"), py::arg("gold"), "Returns (tp, fp, fn).");

  m.def("f1", &f1, py::arg("precision"), py::arg("recall"));

  m.def(
      "aggregate",
      [](const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& counts) {
        std::vector<PerQueryCounts> pq;
        for (const auto& [tp, fp, fn] : counts) pq.push_back({"", tp, fp, fn, false});
        const auto r = aggregate(pq);
        py::dict d;
        d["micro"] = metrics_dict(r.micro);
        d["macro"] = metrics_dict(r.macro);
        d["n_queries"] = r.n_queries;
        return d;
      },
      py::arg("counts"), "Aggregates (tp, fp, fn) triples into micro and macro metrics.");

  py::class_<LlmGateway>(m, "_Gateway")
      .def(py::init([](const std::string& config_json, const std::string& base_dir) {
             return std::make_unique<LlmGateway>(
                 GatewayConfig::from_json(json::parse(config_json), base_dir));
           }),
           py::arg("config_json"), py::arg("base_dir") = "")
      .def(
          "complete",
          [](LlmGateway& g, std::string user_text, std::optional<std::string> system_text) {
            ChatRequest r;
            r.user_text = std::move(user_text);
            r.system_text = std::move(system_text);
            py::gil_scoped_release release;
            return g.complete(r).text;
          },
          py::arg("user_text"), py::arg("system_text") = py::none())
      .def_property_readonly("call_count", &LlmGateway::call_count)
      .def_property_readonly("backend_id", &LlmGateway::backend_id);

  m.def(
      "_predict",
      [](const QueryInstance& instance, const std::string& retriever, std::size_t k,
         const std::string& mode, LlmGateway* gateway, std::size_t embed_dim) {
        EmbeddingProviderConfig ec;
        ec.dim = embed_dim;
        EmbeddingProvider embedder(ec);
        PredictorOptions o;
        if (mode == "retrieval") {
          o.mode = PredictMode::kRetrievalOnly;
        } else if (mode != "pipeline") {
          throw ConfigError("unknown mode " + mode);
        }
        Prediction p;
        {
          py::gil_scoped_release release;
          p = predict(instance, {parse_retriever_kind(retriever), k}, o, {gateway, &embedder});
        }
        return prediction_to_json(p).dump();
      },
      py::arg("instance"), py::arg("retriever"), py::arg("k"), py::arg("mode"),
      py::arg("gateway") = nullptr, py::arg("embed_dim") = 256);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
