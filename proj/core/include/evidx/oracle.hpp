#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/decimal.hpp"
#include "evidx/schema.hpp"

namespace evidx {

/// Corpus-level answer. `value` is absent when the statistic is undefined
/// (every document lacks N).
struct ScalarAnswer {
  std::optional<Rational> value;
  std::size_t documents_used = 0;
  std::vector<DocId> documents_missing;  // excluded for lack of N

  std::string coverage_note() const;
};

/// Documents whose per-document sample-size total is strictly above
/// `threshold`. Documents without N never count.
std::int64_t oracle_count_gt(const std::vector<GoldRecord>& gold, const Decimal& threshold = Decimal::from_int(100));

ScalarAnswer oracle_mean(const std::vector<GoldRecord>& gold);
ScalarAnswer oracle_median(const std::vector<GoldRecord>& gold);

enum class CountKind { kMethods, kVariables, kIV, kDV };

/// One (doc_id, count) per document in gold order, over normalized-distinct
/// names.
std::vector<std::pair<DocId, std::int64_t>> oracle_per_doc_counts(const std::vector<GoldRecord>& gold,
                                                                  CountKind kind);

/// M_C_Q5 tuples (IV, DV, E) whose effect is strictly above `threshold`,
/// first occurrence per (doc, iv, dv). With `absolute`, |E| is compared.
std::vector<StudyTuple> oracle_strong_pairs(const std::vector<GoldRecord>& gold,
                                            const Decimal& threshold = *Decimal::parse("0.7"),
                                            bool absolute = false);

/// Ground truth for one derived query.
struct DerivedAnswer {
  std::string query_id;
  ScoringKind kind = ScoringKind::kCorpusScalar;
  ScalarAnswer scalar;                                    // O_C_*
  std::vector<std::pair<DocId, std::int64_t>> per_doc;    // M_C_Q1..Q4
  std::vector<StudyTuple> tuples;                         // M_C_Q5
};

/// Throws InputError for non-derived queries.
DerivedAnswer oracle_answer(const QuerySpec& query, const std::vector<GoldRecord>& gold,
                            bool absolute_effects = false);

/// Output string for a scalar: exact decimal when it terminates, otherwise
/// six fractional digits.
std::string scalar_display(const Rational& value);

nlohmann::json to_json(const DerivedAnswer& answer);

/// All derived answers for a domain, keyed by query id, as written to
/// oracle.json.
nlohmann::json oracle_report(const std::vector<GoldRecord>& gold, bool absolute_effects = false);

}  // namespace evidx
