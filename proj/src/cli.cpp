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

#include "citedisc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "citedisc/corpus.hpp"
#include "citedisc/dense.hpp"
#include "citedisc/errors.hpp"
#include "citedisc/evaluation.hpp"
#include "citedisc/hashing.hpp"
#include "citedisc/llm_gateway.hpp"
#include "citedisc/predictor.hpp"
#include "citedisc/prompts.hpp"

namespace citedisc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kToolVersion = "0.1.0";

struct RunConfig {
  fs::path dataset;
  std::vector<std::string> retrievers;
  std::vector<std::size_t> ks;
  std::string mode;
  std::optional<fs::path> gateway_config;
  std::optional<fs::path> embedder_config;
  std::optional<fs::path> out;
  std::size_t parallel = 1;
  bool single = false;
  bool triples_in_prompt = false;
  std::string format = "table";
  std::string relation_scorer = "lexical";
  bool strict = true;
  std::size_t abstract_char_budget = 1200;
  // Reserved; every backend used under mocks is deterministic.
  std::uint64_t seed = 0;

  json to_json() const {
    json j;
    j["dataset"] = dataset.string();
    j["retrievers"] = retrievers;
    j["k"] = ks;
    j["mode"] = mode;
    if (gateway_config) j["gateway_config"] = gateway_config->string();
    if (embedder_config) j["embedder_config"] = embedder_config->string();
    j["parallel"] = parallel;
    j["single"] = single;
    j["triples_in_prompt"] = triples_in_prompt;
    j["relation_scorer"] = relation_scorer;
    j["strict"] = strict;
    j["abstract_char_budget"] = abstract_char_budget;
    j["seed"] = seed;
    return j;
  }
};

// Raw flag values; a flag overrides the config file only when given.
struct RunFlags {
  std::string config;
  std::string dataset;
  std::vector<std::string> retrievers;
  std::vector<std::size_t> ks;
  std::string mode;
  std::string gateway_config;
  std::string embedder_config;
  std::string out;
  std::size_t parallel = 1;
  bool single = false;
  bool triples_in_prompt = false;
  std::string format = "table";
  std::string relation_scorer;
  bool lenient = false;
  std::size_t abstract_char_budget = 1200;
  std::uint64_t seed = 0;
};

void add_run_options(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config, "Run configuration file (JSON); flags override it");
  cmd.add_option("--dataset", f.dataset, "Dataset file, one JSON record per line");
  cmd.add_option("--retriever", f.retrievers, "tfidf, dense or relation (repeatable)")
      ->check(CLI::IsMember({"tfidf", "dense", "relation"}));
  cmd.add_option("--k", f.ks, "Top-k cutoff (repeatable)")->check(CLI::PositiveNumber);
  cmd.add_option("--mode", f.mode, "retrieval or pipeline")
      ->check(CLI::IsMember({"retrieval", "pipeline"}));
  cmd.add_option("--gateway-config", f.gateway_config, "LLM gateway configuration (JSON)");
  cmd.add_option("--embedder-config", f.embedder_config, "Embedding provider configuration (JSON)");
  cmd.add_option("--out", f.out, "Output directory for reports, dumps and run metadata");
  cmd.add_option("--parallel", f.parallel, "Worker threads")->check(CLI::PositiveNumber);
  cmd.add_flag("--single", f.single, "Let the LLM choose exactly one id");
  cmd.add_flag("--triples-in-prompt", f.triples_in_prompt,
               "Include extracted triples in the selection prompt");
  cmd.add_option("--format", f.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  cmd.add_option("--relation-scorer", f.relation_scorer, "lexical or dense")
      ->check(CLI::IsMember({"lexical", "dense"}));
  cmd.add_flag("--lenient", f.lenient, "Treat gold ids outside the pool as warnings");
  cmd.add_option("--abstract-budget", f.abstract_char_budget,
                 "Characters of each abstract shown to the LLM")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", f.seed, "Reserved");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

RunConfig make_run_config(const CLI::App& cmd, const RunFlags& f, std::string default_mode,
                          std::vector<std::size_t> default_ks) {
  RunConfig c;
  c.mode = std::move(default_mode);
  c.ks = std::move(default_ks);
  c.retrievers = {"tfidf", "dense", "relation"};

  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open run config " + f.config);
    json j;
    try {
      j = json::parse(in);
      const fs::path base = fs::path(f.config).parent_path();
      if (j.contains("dataset")) c.dataset = resolve(base, j.at("dataset").get<std::string>());
      if (j.contains("retrievers")) c.retrievers = j.at("retrievers").get<std::vector<std::string>>();
      if (j.contains("k")) c.ks = j.at("k").get<std::vector<std::size_t>>();
      if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
      if (j.contains("gateway_config")) c.gateway_config = resolve(base, j.at("gateway_config").get<std::string>());
      if (j.contains("embedder_config")) c.embedder_config = resolve(base, j.at("embedder_config").get<std::string>());
      if (j.contains("out")) c.out = resolve(base, j.at("out").get<std::string>());
      c.parallel = j.value("parallel", c.parallel);
      c.single = j.value("single", c.single);
      c.triples_in_prompt = j.value("triples_in_prompt", c.triples_in_prompt);
      c.format = j.value("format", c.format);
      c.relation_scorer = j.value("relation_scorer", c.relation_scorer);
      c.strict = j.value("strict", c.strict);
      c.abstract_char_budget = j.value("abstract_char_budget", c.abstract_char_budget);
      c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
      throw ConfigError("invalid run config " + f.config + ": " + e.what());
    }
  }

  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--dataset")) c.dataset = f.dataset;
  if (given("--retriever")) c.retrievers = f.retrievers;
  if (given("--k")) c.ks = f.ks;
  if (given("--mode")) c.mode = f.mode;
  if (given("--gateway-config")) c.gateway_config = f.gateway_config;
  if (given("--embedder-config")) c.embedder_config = f.embedder_config;
  if (given("--out")) c.out = f.out;
  if (given("--parallel")) c.parallel = f.parallel;
  if (given("--single")) c.single = true;
  if (given("--triples-in-prompt")) c.triples_in_prompt = true;
  if (given("--format")) c.format = f.format;
  if (given("--relation-scorer")) c.relation_scorer = f.relation_scorer;
  if (given("--lenient")) c.strict = false;
  if (given("--abstract-budget")) c.abstract_char_budget = f.abstract_char_budget;
  if (given("--seed")) c.seed = f.seed;

  if (c.dataset.empty()) throw ConfigError("no dataset given (--dataset)");
  if (c.retrievers.empty()) throw ConfigError("no retriever selected");
  for (const auto& r : c.retrievers) parse_retriever_kind(r);
  if (c.ks.empty()) throw ConfigError("no k given");
  for (auto k : c.ks) {
    if (k == 0) throw ConfigError("k values must be at least 1");
  }
  if (c.mode != "retrieval" && c.mode != "pipeline") throw ConfigError("unknown mode " + c.mode);
  if (c.format != "table" && c.format != "json") throw ConfigError("unknown format " + c.format);
  if (c.relation_scorer != "lexical" && c.relation_scorer != "dense") {
    throw ConfigError("unknown relation scorer " + c.relation_scorer);
  }
  if (c.parallel == 0) throw ConfigError("parallel must be at least 1");
  const bool needs_gateway =
      c.mode == "pipeline" ||
      std::find(c.retrievers.begin(), c.retrievers.end(), "relation") != c.retrievers.end();
  if (needs_gateway && !c.gateway_config) {
    throw ConfigError("a gateway config (--gateway-config) is required for the pipeline mode "
                      "and the relation retriever");
  }
  return c;
}

std::string system_label(RetrieverKind kind) {
  return kind == RetrieverKind::kRelation ? "relation-based" : std::string(to_string(kind));
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

struct Services {
  std::unique_ptr<LlmGateway> gateway;
  std::unique_ptr<EmbeddingProvider> embedder;

  PredictorServices view() const { return {gateway.get(), embedder.get()}; }
};

json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + " " + path.string() + " is not valid JSON: " + e.what());
  }
}

Services make_services(const RunConfig& c) {
  Services s;
  if (c.gateway_config) s.gateway = std::make_unique<LlmGateway>(GatewayConfig::from_file(*c.gateway_config));
  EmbeddingProviderConfig embedder;
  if (c.embedder_config) {
    embedder = EmbeddingProviderConfig::from_json(read_json_file(*c.embedder_config, "embedder config"));
  }
  s.embedder = std::make_unique<EmbeddingProvider>(embedder);
  return s;
}

PredictorOptions predictor_options(const RunConfig& c) {
  PredictorOptions o;
  o.mode = c.mode == "pipeline" ? PredictMode::kPipeline : PredictMode::kRetrievalOnly;
  o.single = c.single;
  o.triples_in_prompt = c.triples_in_prompt;
  o.abstract_char_budget = c.abstract_char_budget;
  o.relation_scorer = c.relation_scorer == "dense" ? RelationScorer::kDense : RelationScorer::kLexical;
  return o;
}

struct RunOutput {
  std::vector<NamedReport> reports;
  std::vector<std::pair<std::string, std::vector<Prediction>>> dumps;
};

void emit(const std::string& command, const RunConfig& c, const Services& services,
          const RunOutput& result, const std::string& started_at, std::size_t n_queries,
          std::ostream& out, std::ostream& err) {
  const ReportFormat format = c.format == "json" ? ReportFormat::kJson : ReportFormat::kTable;
  out << render_report(result.reports, format);
  if (!c.out) return;

  const fs::path dir = *c.out;
  std::error_code ec;
  fs::create_directories(dir / "predictions", ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  write_file(dir / "report.md", render_report(result.reports, ReportFormat::kTable));
  write_file(dir / "report.json", render_report(result.reports, ReportFormat::kJson));
  for (const auto& [name, predictions] : result.dumps) {
    std::ostringstream dump;
    write_predictions(predictions, dump);
    write_file(dir / "predictions" / (name + ".jsonl"), dump.str());
  }

  const json config = c.to_json();
  json meta;
  meta["command"] = command;
  meta["tool_version"] = kToolVersion;
  meta["config"] = config;
  meta["config_digest"] = hex_digest(config.dump());
  meta["templates"] = {std::string(relation_extraction_template().name),
                       std::string(citation_selection_template().name)};
  meta["embedder"] = services.embedder->config().to_json();
  if (services.gateway) {
    meta["gateway"] = {{"backend", services.gateway->backend_id()},
                       {"model", services.gateway->config().model_name.value_or("")},
                       {"calls", services.gateway->call_count()}};
  }
  meta["n_queries"] = n_queries;
  meta["started_at"] = started_at;
  meta["finished_at"] = utc_now();
  write_file(dir / "run_meta.json", meta.dump(2) + "\n");

  if (services.gateway) {
    std::string calls;
    for (const auto& r : services.gateway->call_log()) {
      calls += json{{"sequence", r.sequence},
                    {"request_digest", r.request_digest},
                    {"response_digest", r.response_digest},
                    {"prompt_prefix", r.prompt_prefix},
                    {"latency_ms", r.latency.count()},
                    {"attempts", r.attempts},
                    {"ok", r.ok},
                    {"error", r.error}}
                   .dump(-1, ' ', false, json::error_handler_t::replace);
      calls += '\n';
    }
    write_file(dir / "gateway_calls.jsonl", calls);
  }
  err << "wrote " << result.reports.size() << " report row(s) to " << dir.string() << "\n";
}

Dataset load_for_run(const RunConfig& c) {
  ValidationOptions options;
  options.strict = c.strict;
  options.require_gold = true;
  return load_dataset(c.dataset, options);
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.mode != "retrieval") throw ConfigError("sweep runs in retrieval mode only; use predict");
  const std::string started_at = utc_now();
  const Dataset dataset = load_for_run(c);
  Services services = make_services(c);
  const PredictorOptions options = predictor_options(c);
  const std::size_t max_k = *std::max_element(c.ks.begin(), c.ks.end());

  RunOutput result;
  for (const auto& name : c.retrievers) {
    const RetrieverKind kind = parse_retriever_kind(name);
    // One ranking per query at the largest k; smaller cutoffs are prefixes.
    std::vector<std::optional<StageOne>> stages(dataset.size());
    std::vector<std::string> errors(dataset.size());
    parallel_for(dataset.size(), c.parallel, [&](std::size_t i) {
      try {
        stages[i] = retrieve_stage(dataset.instances[i], kind, max_k, options, services.view());
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });

    for (std::size_t k : c.ks) {
      std::vector<Prediction> predictions(dataset.size());
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        Prediction& p = predictions[i];
        p.query_id = dataset.instances[i].query_id;
        if (!stages[i]) {
          p.failed = true;
          p.error = errors[i];
          continue;
        }
        p.retrieved_ids = stages[i]->ranking.prefix(k).ids();
        p.predicted_ids.insert(p.retrieved_ids.begin(), p.retrieved_ids.end());
        p.warnings = stages[i]->warnings;
      }
      const std::string row = fmt::format("{}-{}", system_label(kind), k);
      result.reports.emplace_back(row, evaluate(dataset, predictions));
      result.dumps.emplace_back(row, std::move(predictions));
    }
  }
  emit("sweep", c, services, result, started_at, dataset.size(), out, err);
  return kExitOk;
}

int cmd_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.mode != "pipeline") throw ConfigError("predict runs the full pipeline; use sweep for retrieval only");
  const std::string started_at = utc_now();
  const Dataset dataset = load_for_run(c);
  Services services = make_services(c);
  const PredictorOptions options = predictor_options(c);

  RunOutput result;
  for (const auto& name : c.retrievers) {
    const RetrieverKind kind = parse_retriever_kind(name);
    for (std::size_t k : c.ks) {
      auto predictions = predict_all(dataset, {kind, k}, options, services.view(), c.parallel);
      const std::string row = fmt::format("llm-{}-{}", system_label(kind), k);
      result.reports.emplace_back(row, evaluate(dataset, predictions));
      result.dumps.emplace_back(row, std::move(predictions));
    }
  }
  emit("predict", c, services, result, started_at, dataset.size(), out, err);
  return kExitOk;
}

int cmd_validate(const std::string& path, bool lenient, bool allow_missing_gold, std::ostream& out) {
  ValidationOptions options;
  options.strict = !lenient;
  options.require_gold = !allow_missing_gold;
  const LoadReport report = scan_dataset(fs::path(path), options);

  std::size_t bad_lines = 0;
  std::size_t last_bad = 0;
  for (const auto& d : report.diagnostics) {
    out << (d.is_error ? "error: " : "warning: ") << d.message << "\n";
    if (d.is_error && d.line != last_bad) {
      ++bad_lines;
      last_bad = d.line;
    }
  }
  if (report.ok()) {
    out << report.dataset.size() << " instances OK\n";
    return kExitOk;
  }
  out << bad_lines << " of " << report.record_count << " records invalid\n";
  return kExitValidationFailed;
}

int cmd_report(const std::string& dataset_path, const std::vector<std::string>& prediction_specs,
               const std::vector<std::string>& json_inputs, const std::string& format, bool lenient,
               std::ostream& out) {
  std::vector<NamedReport> reports;
  for (const auto& path : json_inputs) {
    auto loaded = report_from_json(read_json_file(path, "report"));
    reports.insert(reports.end(), loaded.begin(), loaded.end());
  }
  if (!prediction_specs.empty()) {
    if (dataset_path.empty()) throw ConfigError("--predictions requires --dataset");
    ValidationOptions options;
    options.strict = !lenient;
    const Dataset dataset = load_dataset(dataset_path, options);
    for (const auto& entry : prediction_specs) {
      const auto eq = entry.find('=');
      const std::string path = eq == std::string::npos ? entry : entry.substr(eq + 1);
      const std::string name = eq == std::string::npos ? fs::path(entry).stem().string() : entry.substr(0, eq);
      std::ifstream in(path);
      if (!in) throw IoError("cannot open predictions " + path);
      const auto predictions = read_predictions(in);
      reports.emplace_back(name, evaluate(dataset, predictions));
    }
  }
  out << render_report(reports, format == "json" ? ReportFormat::kJson : ReportFormat::kTable);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"citation discovery by relation-based retrieval and LLM selection", "citedisc"};
  app.require_subcommand(1);

  std::string validate_path;
  bool validate_lenient = false;
  bool validate_allow_missing_gold = false;
  auto* validate = app.add_subcommand("validate", "Check a dataset file and report every problem");
  validate->add_option("path", validate_path, "Dataset file");
  validate->add_option("--dataset", validate_path, "Dataset file");
  validate->add_flag("--lenient", validate_lenient, "Treat gold ids outside the pool as warnings");
  validate->add_flag("--allow-missing-gold", validate_allow_missing_gold,
                     "Accept records without gold ids (inference-only data)");

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Retrieval-only evaluation over retrievers and k values");
  add_run_options(*sweep, sweep_flags);

  RunFlags predict_flags;
  auto* predict_cmd = app.add_subcommand("predict", "Retrieve, then let the LLM select cited ids");
  add_run_options(*predict_cmd, predict_flags);

  std::string report_dataset;
  std::vector<std::string> report_predictions;
  std::vector<std::string> report_json;
  std::string report_format = "table";
  bool report_lenient = false;
  auto* report = app.add_subcommand("report", "Render reports from prediction dumps or report files");
  report->add_option("--dataset", report_dataset, "Dataset with gold ids");
  report->add_option("--predictions", report_predictions, "NAME=PATH of a prediction dump (repeatable)");
  report->add_option("--from-json", report_json, "Machine-readable report to re-render (repeatable)");
  report->add_option("--format", report_format, "table or json")->check(CLI::IsMember({"table", "json"}));
  report->add_flag("--lenient", report_lenient, "Treat gold ids outside the pool as warnings");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help is raised from inside the subcommand.
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (validate->parsed()) {
      if (validate_path.empty()) throw ConfigError("validate needs a dataset path");
      return cmd_validate(validate_path, validate_lenient, validate_allow_missing_gold, out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(make_run_config(*sweep, sweep_flags, "retrieval", {10, 15, 20}), out, err);
    }
    if (predict_cmd->parsed()) {
      return cmd_predict(make_run_config(*predict_cmd, predict_flags, "pipeline", {20}), out, err);
    }
    if (report->parsed()) {
      if (report_predictions.empty() && report_json.empty()) {
        throw ConfigError("report needs --predictions or --from-json");
      }
      return cmd_report(report_dataset, report_predictions, report_json, report_format,
                        report_lenient, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const DatasetError& e) {
    err << "dataset error: " << e.what() << "\n";
    return kExitValidationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

}  // namespace citedisc
