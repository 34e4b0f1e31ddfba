#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/gateway.hpp"
#include "evidx/matcher.hpp"
#include "evidx/oracle.hpp"
#include "evidx/schema.hpp"

namespace evidx {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const PRF&, const PRF&) = default;
};

/// P = correct/predicted, R = correct/gold, F1 = harmonic mean; each is 0
/// when its denominator is 0. Requires correct <= min(predicted, gold).
PRF prf(std::size_t correct, std::size_t predicted, std::size_t gold);

/// Unweighted mean of P, R and F1 independently; zeros for an empty list.
PRF macro_average(const std::vector<PRF>& children);

/// Exact equality after canonicalization; non-terminating exact values use
/// numerically_equal. Null, text that is not a number, or an undefined
/// oracle value all give false.
bool score_derived(const std::optional<SlotValue>& predicted, const std::optional<Rational>& oracle);

/// Scored result for one (query, regime) cell together with its audit trail.
struct QueryScore {
  std::string query_id;
  std::string regime;
  ScoringKind kind = ScoringKind::kTupleList;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  PRF prf;
  /// Derived queries only: 0/1 for scalars and strong-pair sets, per-document
  /// accuracy for per-document counts.
  std::optional<double> success;

  std::vector<StudyTuple> predictions;
  std::vector<StudyTuple> gold_tuples;
  std::optional<MatchReport> match;  // list-style and M_C_Q5
  std::optional<SlotValue> predicted_scalar;
  std::optional<Rational> oracle_scalar;
  std::vector<std::string> warnings;
};

/// List-style query scored with match_tuples.
QueryScore score_tuple_list(const QuerySpec& query, const std::string& regime, std::vector<StudyTuple> predictions,
                            std::vector<StudyTuple> gold, Judge* judge);

/// Corpus scalar: P/R/F1 over a single answer (predicted = 1 if answered).
QueryScore score_corpus_scalar(const QuerySpec& query, const std::string& regime,
                               const std::optional<SlotValue>& predicted, const DerivedAnswer& oracle);

/// Per-document counts: one equality check per expected document. The first
/// answer for a document is used; later ones are reported as warnings.
QueryScore score_per_document_counts(const QuerySpec& query, const std::string& regime,
                                     std::vector<StudyTuple> predictions, const DerivedAnswer& oracle);

/// M_C_Q5: matched as tuples on (IV, DV); success means exact set equality.
QueryScore score_strong_pairs(const QuerySpec& query, const std::string& regime, std::vector<StudyTuple> predictions,
                              const DerivedAnswer& oracle, Judge* judge);

nlohmann::json to_json(const QueryScore& score);
QueryScore query_score_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Rollups
// ---------------------------------------------------------------------------

struct CellKey {
  std::string domain;
  std::string model;
  std::string regime;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

/// Macro averages for one (domain, model, regime) cell.
struct CellRollup {
  CellKey key;
  std::map<std::string, PRF> queries;  // by query id
  std::map<std::string, PRF> groups;   // O1 .. MC, only groups with scores
  PRF all_queries;                     // mean over query scores
  PRF all_groups;                      // mean over group scores
  bool partial = false;
  std::vector<std::string> missing;    // query ids without a score
};

CellRollup rollup_cell(CellKey key, const std::map<std::string, PRF>& query_scores);

/// Per (model, regime), the unweighted mean of each figure across domains.
/// The result uses domain "average".
std::vector<CellRollup> average_over_domains(const std::vector<CellRollup>& cells);

nlohmann::json to_json(const PRF& p);
nlohmann::json to_json(const CellRollup& rollup);

enum class AllLevel { kQueries, kGroups };

struct DeltaRow {
  std::string domain;
  std::string model;
  double per_paper_f1 = 0.0;
  double global_f1 = 0.0;
  double drop = 0.0;  // difference of the two-decimal figures
};

/// Per (domain, model): per-paper All F1 minus global All F1. Throws
/// InputError when a key has only one regime.
std::vector<DeltaRow> regime_delta(const std::vector<CellRollup>& cells, AllLevel level = AllLevel::kQueries);

/// Two-decimal rendering with half-up rounding ("0.17").
std::string format_2dp(double value);

/// Table cell style: ".35", "1.0", ".00".
std::string format_table_cell(double value);

std::string regime_delta_csv(const std::vector<DeltaRow>& rows);

/// Table with groups for each regime side by side and both All figures.
std::string rollup_markdown(const std::vector<CellRollup>& cells);

/// One row per (domain, model, regime, query) with P, R, F1 and counts.
std::string per_query_csv(const std::vector<std::pair<CellKey, QueryScore>>& scores);

}  // namespace evidx
