#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/corpus.hpp"
#include "evidx/gateway.hpp"
#include "evidx/schema.hpp"

namespace evidx {

enum class Regime { kPerPaper, kGlobal };

std::string_view regime_name(Regime regime);  // "per-paper" | "global"
std::optional<Regime> regime_from_name(std::string_view name);

/// Versioned instruction text placed at the top of every prompt.
struct InstructionHeader {
  std::string version;
  std::string text;

  std::string fingerprint() const;  // sha256 of text
};

/// Throws InputError for unknown versions. Only "v1" ships today.
const InstructionHeader& instruction_header(std::string_view version = "v1");

namespace detail {
extern const char* const kInstructionHeaderV1;
}

/// Single-document variant of a query. List-style and per-document derived
/// queries keep their pattern and get re-scoped text; corpus-level O_C_*
/// queries become a request for the document's own sample size, with the
/// corpus computation left to the aggregation step.
QuerySpec rewrite_per_document(const QuerySpec& query);

/// Query as it is posed under a regime (per-paper applies the rewrite).
QuerySpec effective_query(const QuerySpec& query, Regime regime);

/// Output-format section describing the JSON-lines contract for `query`.
std::string output_contract(const QuerySpec& query);

struct PromptBundle {
  std::string query_id;
  Regime regime = Regime::kGlobal;
  std::optional<DocId> doc_id;  // set only for per-paper prompts
  std::string prompt_text;
  std::string instruction_version;
};

/// Per-paper requires a doc_id in the corpus; global forbids one. Throws
/// InputError otherwise.
PromptBundle render_prompt(const QuerySpec& query, Regime regime, const Corpus& corpus,
                           std::optional<DocId> doc_id,
                           const InstructionHeader& header = instruction_header());

struct RawResponse {
  std::string prompt_key;
  std::string text;
  std::string model;
};

struct ParseResult {
  std::vector<StudyTuple> tuples;
  std::optional<SlotValue> scalar;  // scalar answers (corpus-level queries)
  std::vector<std::string> warnings;
};

/// Parses a JSON-lines response. Prose and code fences around the block are
/// ignored. Global: attribution comes from the "doc" marker and lines without
/// a valid marker are dropped. Per-paper: attribution is forced to doc_id.
/// Lines whose keys do not match the query's slots are dropped. Never throws
/// on model output.
ParseResult parse_response(std::string_view text, const QuerySpec& query, Regime regime,
                           std::optional<DocId> doc_id, const std::set<DocId>& corpus_ids);

/// One JSON object per line, as the output contract asks for.
std::string serialize_tuples(const std::vector<StudyTuple>& tuples, bool with_doc = true);

/// First line after the instruction header in aggregation prompts.
inline constexpr std::string_view kAggregationMarker = "=== DOCUMENT-LEVEL OUTPUTS ===";

/// Prompt combining per-document outputs for a corpus-level query. Contains no
/// document text. Outputs are listed in doc_id order.
std::string render_aggregation_prompt(std::vector<std::pair<DocId, std::string>> per_doc_outputs,
                                      const QuerySpec& query,
                                      const InstructionHeader& header = instruction_header());

struct AggregationResult {
  std::string prompt_key;
  std::string text;
};

/// Runs the aggregation call. Only valid for corpus-level queries.
AggregationResult aggregate_per_paper(std::vector<std::pair<DocId, std::string>> per_doc_outputs,
                                      const QuerySpec& query, Gateway& gateway, const std::string& model,
                                      const InstructionHeader& header = instruction_header());

}  // namespace evidx
