#include "evidx/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evidx/error.hpp"
#include "evidx/fs_util.hpp"
#include "evidx/gold_json.hpp"
#include "evidx/oracle.hpp"

namespace evidx {
namespace fs = std::filesystem;

namespace {

struct Cell {
  std::shared_ptr<const Corpus> corpus;
  std::string model;
  Regime regime;
  const QuerySpec* query;
};

std::vector<Cell> plan_cells(const RunConfig& config, const std::vector<std::shared_ptr<const Corpus>>& corpora) {
  std::vector<Cell> cells;
  const auto queries = selected_queries(config);
  for (const auto& corpus : corpora) {
    for (const auto& model : config.models) {
      for (Regime regime : config.regimes) {
        for (const QuerySpec* q : queries) cells.push_back({corpus, model, regime, q});
      }
    }
  }
  return cells;
}

CompletionRequest make_request(const RunConfig& config, const std::string& model, std::string prompt) {
  CompletionRequest r;
  r.model = model;
  r.temperature = config.temperature;
  r.prompt = std::move(prompt);
  return r;
}

std::set<DocId> id_set(const Corpus& corpus) {
  auto ids = corpus.doc_ids();
  return {ids.begin(), ids.end()};
}

std::vector<Slot> parsed_slots(const QuerySpec& query, Regime regime) {
  const QuerySpec posed = effective_query(query, regime);
  return posed.document_attributed ? posed.slots : std::vector<Slot>{};
}

PredictionFile run_cell(const RunConfig& config, Gateway& gateway, const Cell& cell) {
  const Corpus& corpus = *cell.corpus;
  const QuerySpec& query = *cell.query;
  const InstructionHeader& header = instruction_header(config.instructions);
  PredictionFile f;
  f.query_id = query.id;
  f.domain = corpus.domain;
  f.model = cell.model;
  f.regime = cell.regime;
  f.instruction_version = header.version;
  f.instruction_fingerprint = header.fingerprint();
  f.tuple_slots = parsed_slots(query, cell.regime);
  const std::set<DocId> ids = id_set(corpus);

  try {
    if (cell.regime == Regime::kGlobal) {
      PromptBundle bundle = render_prompt(query, cell.regime, corpus, std::nullopt, header);
      auto c = gateway.complete(make_request(config, cell.model, bundle.prompt_text));
      ParseResult p = parse_response(c.text, query, cell.regime, std::nullopt, ids);
      f.calls.push_back({std::nullopt, c.key, c.text, p.tuples, p.warnings});
      f.tuples = p.tuples;
      f.answer = p.scalar;
    } else {
      std::vector<std::pair<DocId, std::string>> outputs;
      for (DocId id : corpus.doc_ids()) {
        PromptBundle bundle = render_prompt(query, cell.regime, corpus, id, header);
        auto c = gateway.complete(make_request(config, cell.model, bundle.prompt_text));
        ParseResult p = parse_response(c.text, query, cell.regime, id, ids);
        f.tuples.insert(f.tuples.end(), p.tuples.begin(), p.tuples.end());
        f.calls.push_back({id, c.key, c.text, std::move(p.tuples), std::move(p.warnings)});
        outputs.emplace_back(id, c.text);
      }
      if (query.scoring() == ScoringKind::kCorpusScalar) {
        const std::string prompt = render_aggregation_prompt(std::move(outputs), query, header);
        auto c = gateway.complete(make_request(config, cell.model, prompt));
        ParseResult p = parse_response(c.text, query, Regime::kGlobal, std::nullopt, ids);
        f.aggregation = CallRecord{std::nullopt, c.key, c.text, {}, p.warnings};
        f.answer = p.scalar;
      }
    }
  } catch (const BackendError& e) {
    f.failed = true;
    f.error = e.what();
  }
  return f;
}

nlohmann::json tuple_array(const std::vector<StudyTuple>& tuples) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tuples) arr.push_back(nlohmann::json(tuple_to_json(t)));
  return arr;
}

std::vector<StudyTuple> tuples_from(const nlohmann::json& arr, const std::string& query_id,
                                    const std::vector<Slot>& slots) {
  QuerySpec shape = query_by_id(query_id);
  shape.slots = slots;
  shape.document_attributed = true;
  std::vector<StudyTuple> out;
  for (const auto& obj : arr) out.push_back(tuple_from_json(obj, shape));
  return out;
}

nlohmann::json call_json(const CallRecord& c) {
  return {{"doc", c.doc_id ? nlohmann::json(*c.doc_id) : nlohmann::json(nullptr)},
          {"prompt_key", c.prompt_key},
          {"raw_text", c.raw_text},
          {"tuples", tuple_array(c.tuples)},
          {"warnings", c.warnings}};
}

CallRecord call_from(const nlohmann::json& j, const std::string& query_id, const std::vector<Slot>& slots) {
  CallRecord c;
  if (!j.at("doc").is_null()) c.doc_id = j.at("doc").get<DocId>();
  c.prompt_key = j.at("prompt_key").get<std::string>();
  c.raw_text = j.at("raw_text").get<std::string>();
  c.tuples = tuples_from(j.at("tuples"), query_id, slots);
  c.warnings = j.at("warnings").get<std::vector<std::string>>();
  return c;
}

nlohmann::json value_json(const std::optional<SlotValue>& v) {
  if (!v || is_null(*v)) return nullptr;
  if (const auto* d = std::get_if<Decimal>(&*v)) return {{"number", d->to_string()}};
  return {{"text", value_to_string(*v)}};
}

std::optional<SlotValue> value_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.contains("number")) {
    auto d = Decimal::parse(j.at("number").get<std::string>());
    if (!d) throw InputError("malformed numeric answer " + j.dump());
    return SlotValue{*d};
  }
  return SlotValue{j.at("text").get<std::string>()};
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string fs_component(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(c == '/' || c == '\\' || c == ':' ? '_' : c);
  return out;
}

}  // namespace

std::vector<std::shared_ptr<const Corpus>> load_corpora(const RunConfig& config) {
  if (config.corpus_dirs.empty()) throw InputError("no --corpus given");
  if (config.gold && config.corpus_dirs.size() != 1) {
    throw InputError("--gold replaces the gold file of a single corpus; got " +
                     std::to_string(config.corpus_dirs.size()) + " corpora");
  }
  std::vector<std::shared_ptr<const Corpus>> out;
  std::set<std::string> domains;
  for (const auto& dir : config.corpus_dirs) {
    Corpus c = config.gold ? load_corpus(dir / "docs", *config.gold) : load_domain(dir);
    if (c.domain.empty()) c.domain = dir.filename().string();
    if (!domains.insert(c.domain).second) throw InputError("domain '" + c.domain + "' given twice");
    ValidationReport report = validate_gold_set(c.gold);
    if (!report.valid()) {
      std::string msg = "gold for domain '" + c.domain + "' has schema violations:";
      for (const auto& v : report.violations) {
        if (v.severity == Violation::Severity::kError) msg += "\n  " + v.path + ": " + v.message;
      }
      throw InputError(msg);
    }
    out.push_back(std::make_shared<const Corpus>(std::move(c)));
  }
  return out;
}

std::vector<const QuerySpec*> selected_queries(const RunConfig& config) {
  std::vector<const QuerySpec*> out;
  if (config.queries.empty()) {
    for (const auto& q : registry()) out.push_back(&q);
    return out;
  }
  std::set<std::string> wanted;
  for (const auto& id : config.queries) wanted.insert(query_by_id(id).id);
  for (const auto& q : registry()) {
    if (wanted.contains(q.id)) out.push_back(&q);
  }
  return out;
}

std::shared_ptr<Gateway> make_gateway(const RunConfig& config,
                                      const std::vector<std::shared_ptr<const Corpus>>& corpora) {
  GatewayConfig g;
  g.backend = config.backend;
  if (config.cache_dir) {
    if (config.backend == BackendKind::kReplay && !fs::is_directory(*config.cache_dir)) {
      throw InputError("replay cache directory not found: " + config.cache_dir->string());
    }
    g.cache = std::make_shared<CompletionCache>(*config.cache_dir);
  }
  if (config.backend == BackendKind::kMock) g.mock = make_gold_echo_responder(corpora, config.echo);
  if (config.backend == BackendKind::kLive) {
    g.live = config.live ? *config.live : LiveConfig::from_env();
    g.transport = config.transport;
  }
  return std::make_shared<Gateway>(std::move(g));
}

fs::path domain_dir(const fs::path& out, const std::string& domain) { return out / fs_component(domain); }

fs::path cell_dir(const fs::path& out, const std::string& domain, const std::string& model, Regime regime) {
  return domain_dir(out, domain) / fs_component(model) / std::string(regime_name(regime));
}

nlohmann::json to_json(const PredictionFile& f) {
  nlohmann::json j;
  j["query_id"] = f.query_id;
  j["domain"] = f.domain;
  j["model"] = f.model;
  j["regime"] = regime_name(f.regime);
  j["instruction_version"] = f.instruction_version;
  j["instruction_fingerprint"] = f.instruction_fingerprint;
  j["tuple_slots"] = nlohmann::json::array();
  for (Slot s : f.tuple_slots) j["tuple_slots"].push_back(std::string(slot_name(s)));
  j["calls"] = nlohmann::json::array();
  for (const auto& c : f.calls) j["calls"].push_back(call_json(c));
  j["aggregation"] = f.aggregation ? call_json(*f.aggregation) : nlohmann::json(nullptr);
  j["tuples"] = tuple_array(f.tuples);
  j["answer"] = value_json(f.answer);
  j["status"] = f.failed ? "failed" : "ok";
  j["error"] = f.error;
  return j;
}

PredictionFile prediction_file_from_json(const nlohmann::json& j) {
  PredictionFile f;
  try {
    f.query_id = query_by_id(j.at("query_id").get<std::string>()).id;
    f.domain = j.at("domain").get<std::string>();
    f.model = j.at("model").get<std::string>();
    auto regime = regime_from_name(j.at("regime").get<std::string>());
    if (!regime) throw InputError("unknown regime in prediction file");
    f.regime = *regime;
    f.instruction_version = j.at("instruction_version").get<std::string>();
    f.instruction_fingerprint = j.at("instruction_fingerprint").get<std::string>();
    for (const auto& n : j.at("tuple_slots")) {
      auto s = slot_from_name(n.get<std::string>());
      if (!s) throw InputError("unknown slot " + n.dump());
      f.tuple_slots.push_back(*s);
    }
    for (const auto& c : j.at("calls")) f.calls.push_back(call_from(c, f.query_id, f.tuple_slots));
    if (!j.at("aggregation").is_null()) f.aggregation = call_from(j.at("aggregation"), f.query_id, {});
    f.tuples = tuples_from(j.at("tuples"), f.query_id, f.tuple_slots);
    f.answer = value_from(j.at("answer"));
    f.failed = j.at("status").get<std::string>() == "failed";
    f.error = j.value("error", "");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed prediction file: ") + e.what());
  }
  return f;
}

std::vector<std::string> missing_replay_keys(const RunConfig& config,
                                             const std::vector<std::shared_ptr<const Corpus>>& corpora) {
  if (!config.cache_dir) throw InputError("replay backend requires --cache");
  if (!fs::is_directory(*config.cache_dir)) {
    throw InputError("replay cache directory not found: " + config.cache_dir->string());
  }
  CompletionCache cache(*config.cache_dir);
  const InstructionHeader& header = instruction_header(config.instructions);
  std::set<std::string> missing;
  for (const Cell& cell : plan_cells(config, corpora)) {
    const Corpus& corpus = *cell.corpus;
    if (cell.regime == Regime::kGlobal) {
      auto b = render_prompt(*cell.query, cell.regime, corpus, std::nullopt, header);
      const std::string key = request_key(make_request(config, cell.model, b.prompt_text));
      if (!cache.contains(key)) missing.insert(key);
      continue;
    }
    std::vector<std::pair<DocId, std::string>> outputs;
    bool complete = true;
    for (DocId id : corpus.doc_ids()) {
      auto b = render_prompt(*cell.query, cell.regime, corpus, id, header);
      const std::string key = request_key(make_request(config, cell.model, b.prompt_text));
      auto hit = cache.get(key);
      if (!hit) {
        missing.insert(key);
        complete = false;
      } else {
        outputs.emplace_back(id, hit->response);
      }
    }
    if (complete && cell.query->scoring() == ScoringKind::kCorpusScalar) {
      const std::string prompt = render_aggregation_prompt(std::move(outputs), *cell.query, header);
      const std::string key = request_key(make_request(config, cell.model, prompt));
      if (!cache.contains(key)) missing.insert(key);
    }
  }
  return {missing.begin(), missing.end()};
}

RunSummary cmd_run(const RunConfig& config) {
  const auto corpora = load_corpora(config);
  instruction_header(config.instructions);
  if (config.models.empty()) throw InputError("no --model given");
  if (config.backend == BackendKind::kReplay) {
    auto missing = missing_replay_keys(config, corpora);
    if (!missing.empty()) throw ReplayMissError(std::move(missing));
  }
  auto gateway = make_gateway(config, corpora);
  const std::vector<Cell> cells = plan_cells(config, corpora);

  RunSummary summary;
  summary.cells = cells.size();
  std::mutex mutex;
  std::exception_ptr fatal;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const Cell& cell = cells[i];
        PredictionFile f = run_cell(config, *gateway, cell);
        const fs::path dir = cell_dir(config.out, cell.corpus->domain, cell.model, cell.regime);
        write_json(dir / (cell.query->id + ".json"), to_json(f));
        if (f.failed) {
          std::lock_guard lock(mutex);
          ++summary.failed_cells;
          summary.failures.push_back(cell.corpus->domain + "/" + cell.model + "/" +
                                     std::string(regime_name(cell.regime)) + "/" + cell.query->id + ": " + f.error);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!fatal) fatal = std::current_exception();
        next = cells.size();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(config.parallel, cells.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  std::sort(summary.failures.begin(), summary.failures.end());
  summary.gateway = gateway->stats();
  summary.prompts = summary.gateway.requests;
  return summary;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream out;
  out << "cells: " << s.cells << " (failed " << s.failed_cells << ")\n";
  out << "prompts: " << s.prompts << "\n";
  out << "backend calls: " << s.gateway.backend_calls << "\n";
  out << "cache hits: " << s.gateway.cache_hits << "\n";
  out << "memo hits: " << s.gateway.memo_hits << "\n";
  out << "network calls: " << s.gateway.network_calls << "\n";
  for (const auto& f : s.failures) out << "failed: " << f << "\n";
  return out.str();
}

ScoreSummary cmd_score(const RunConfig& config) {
  const auto corpora = load_corpora(config);
  auto gateway = make_gateway(config, corpora);
  const std::string judge_model = config.judge_model.empty() ? config.models.at(0) : config.judge_model;
  GatewayJudge judge(*gateway, judge_model, config.temperature);
  judge.collect_replay_misses(config.backend == BackendKind::kReplay);

  ScoreSummary summary;
  std::vector<std::pair<fs::path, nlohmann::json>> pending;
  for (const auto& corpus : corpora) {
    std::map<std::string, DerivedAnswer> oracle;
    for (const auto& model : config.models) {
      for (Regime regime : config.regimes) {
        const fs::path dir = cell_dir(config.out, corpus->domain, model, regime);
        for (const QuerySpec* q : selected_queries(config)) {
          const fs::path file = dir / (q->id + ".json");
          if (!fs::exists(file)) {
            ++summary.missing_predictions;
            continue;
          }
          PredictionFile f;
          try {
            f = prediction_file_from_json(nlohmann::json::parse(read_file(file)));
          } catch (const nlohmann::json::parse_error& e) {
            throw InputError("malformed prediction file " + file.string() + ": " + e.what());
          }
          const std::string regime_label(regime_name(regime));
          QueryScore score;
          switch (q->scoring()) {
            case ScoringKind::kTupleList: {
              std::vector<StudyTuple> gold;
              for (const auto& r : corpus->gold) {
                auto t = project_gold(r, *q);
                gold.insert(gold.end(), t.begin(), t.end());
              }
              score = score_tuple_list(*q, regime_label, f.tuples, std::move(gold), &judge);
              break;
            }
            default: {
              if (!oracle.contains(q->id)) oracle.emplace(q->id, oracle_answer(*q, corpus->gold));
              const DerivedAnswer& answer = oracle.at(q->id);
              if (q->scoring() == ScoringKind::kCorpusScalar) {
                score = score_corpus_scalar(*q, regime_label, f.answer, answer);
              } else if (q->scoring() == ScoringKind::kPerDocumentCount) {
                score = score_per_document_counts(*q, regime_label, f.tuples, answer);
              } else {
                score = score_strong_pairs(*q, regime_label, f.tuples, answer, &judge);
              }
            }
          }
          if (f.failed) score.warnings.push_back("prediction cell failed: " + f.error);
          if (score.match) summary.judge_calls += score.match->judge_calls;
          pending.emplace_back(dir / (q->id + ".score.json"), to_json(score));
          ++summary.scored;
        }
      }
    }
  }
  if (auto missing = judge.missing_keys(); !missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw ReplayMissError(std::move(missing));
  }
  for (const auto& [path, j] : pending) write_json(path, j);
  return summary;
}

void cmd_oracle(const RunConfig& config) {
  for (const auto& corpus : load_corpora(config)) {
    write_json(domain_dir(config.out, corpus->domain) / "oracle.json", oracle_report(corpus->gold));
  }
}

}  // namespace evidx
