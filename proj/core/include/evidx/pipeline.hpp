#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/corpus.hpp"
#include "evidx/error_analysis.hpp"
#include "evidx/gateway.hpp"
#include "evidx/metrics.hpp"
#include "evidx/mock.hpp"
#include "evidx/query_engine.hpp"

namespace evidx {

struct RunConfig {
  std::vector<std::filesystem::path> corpus_dirs;  // each holds docs/*.md and gold.json
  std::optional<std::filesystem::path> gold;       // replaces gold.json of a single corpus
  std::vector<std::string> queries;                // empty: all 24
  std::vector<Regime> regimes{Regime::kPerPaper, Regime::kGlobal};
  BackendKind backend = BackendKind::kMock;
  std::optional<std::filesystem::path> cache_dir;
  std::vector<std::string> models{"gold-echo"};
  std::string judge_model;  // empty: first model
  std::filesystem::path out = "out";
  std::size_t parallel = 1;
  std::string instructions = "v1";
  double temperature = 0.1;

  // Injection points for tests and embedding.
  EchoOptions echo;
  std::shared_ptr<HttpTransport> transport;
  std::optional<LiveConfig> live;  // default: LiveConfig::from_env()
};

/// Loads every configured corpus. Throws InputError on layout problems.
std::vector<std::shared_ptr<const Corpus>> load_corpora(const RunConfig& config);

/// Selected queries in registry order. Throws InputError for unknown ids.
std::vector<const QuerySpec*> selected_queries(const RunConfig& config);

/// Gateway for the configured backend. Mock uses the gold-echo responder
/// over `corpora`; replay requires an existing cache directory.
std::shared_ptr<Gateway> make_gateway(const RunConfig& config,
                                      const std::vector<std::shared_ptr<const Corpus>>& corpora);

/// `<out>/<domain>`, with path separators in the name replaced.
std::filesystem::path domain_dir(const std::filesystem::path& out, const std::string& domain);

std::filesystem::path cell_dir(const std::filesystem::path& out, const std::string& domain, const std::string& model,
                               Regime regime);

// ---------------------------------------------------------------------------
// Prediction files
// ---------------------------------------------------------------------------

struct CallRecord {
  std::optional<DocId> doc_id;  // per-paper calls only
  std::string prompt_key;
  std::string raw_text;
  std::vector<StudyTuple> tuples;
  std::vector<std::string> warnings;
};

struct PredictionFile {
  std::string query_id;
  std::string domain;
  std::string model;
  Regime regime = Regime::kGlobal;
  std::string instruction_version;
  std::string instruction_fingerprint;
  std::vector<Slot> tuple_slots;  // slots of the parsed tuples
  std::vector<CallRecord> calls;
  std::optional<CallRecord> aggregation;  // per-paper corpus-level queries
  std::vector<StudyTuple> tuples;         // all parsed tuples, call order
  std::optional<SlotValue> answer;        // scalar answer for corpus-level queries
  bool failed = false;
  std::string error;
};

nlohmann::json to_json(const PredictionFile& file);
PredictionFile prediction_file_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct RunSummary {
  std::size_t cells = 0;
  std::size_t failed_cells = 0;
  std::size_t prompts = 0;  // complete() calls, aggregation included
  GatewayStats gateway;
  std::vector<std::string> failures;
};

/// Preflight (replay: every prompt key must be cached), then executes every
/// (domain, model, regime, query) cell and writes prediction files. Backend
/// errors inside a cell mark it failed; replay misses abort before any cell
/// runs.
RunSummary cmd_run(const RunConfig& config);

/// All prompt keys a run would request that are missing from the cache,
/// including aggregation prompts whose inputs are cached.
std::vector<std::string> missing_replay_keys(const RunConfig& config,
                                             const std::vector<std::shared_ptr<const Corpus>>& corpora);

struct ScoreSummary {
  std::size_t scored = 0;
  std::size_t missing_predictions = 0;
  std::size_t judge_calls = 0;
};

/// Scores every prediction file present for the configured cells and writes
/// `<query_id>.score.json` next to it. Replay judge misses abort with the
/// complete key list before anything is written.
ScoreSummary cmd_score(const RunConfig& config);

/// Reads score files for the configured cells.
std::vector<ScoredQuery> load_scores(const RunConfig& config,
                                     const std::vector<std::shared_ptr<const Corpus>>& corpora);

TaxonomyReport build_taxonomy(const std::vector<ScoredQuery>& scores,
                              const std::vector<std::shared_ptr<const Corpus>>& corpora);

/// Writes `<out>/<domain>/taxonomy.{json,md}` and the pooled
/// `<out>/taxonomy.{json,md}`. Returns the pooled report.
TaxonomyReport cmd_analyze(const RunConfig& config);

struct ReportBundle {
  std::vector<CellRollup> cells;     // per domain, then averages
  std::vector<DeltaRow> deltas;      // empty unless both regimes are present
  std::string markdown;
  std::string per_query_csv;
  nlohmann::json rollup;
};

ReportBundle build_report(const std::vector<ScoredQuery>& scores);

/// Writes report.md, per_query.csv, rollup.json and regime_delta.csv.
ReportBundle cmd_report(const RunConfig& config);

/// Writes `<out>/<domain>/oracle.json` for every corpus.
void cmd_oracle(const RunConfig& config);

std::string format_summary(const RunSummary& summary);

}  // namespace evidx
