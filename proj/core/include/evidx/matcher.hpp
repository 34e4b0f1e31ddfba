#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/gateway.hpp"
#include "evidx/schema.hpp"

namespace evidx {

/// Text slots at or above this similarity pass without consulting the judge.
inline constexpr double kSimilarityThreshold = 0.95;

/// Matching-blocks ratio 2M / (|a| + |b|) over code points, where M sums the
/// lengths of recursively found longest common substrings (ties: earliest in
/// a, then earliest in b). Empty vs empty is 1.0. Inputs are expected to be
/// normalized already.
double similarity(std::string_view a, std::string_view b);
double similarity(std::u32string_view a, std::u32string_view b);

enum class SlotOutcome { kExactSim, kJudgeYes, kNumericExact, kNullNull, kFail };

std::string_view outcome_name(SlotOutcome outcome);
std::optional<SlotOutcome> outcome_from_name(std::string_view name);
inline bool passes(SlotOutcome outcome) { return outcome != SlotOutcome::kFail; }

struct SlotMatch {
  SlotOutcome outcome = SlotOutcome::kFail;
  double similarity = 0.0;
  std::optional<std::string> judge_key;
  std::optional<std::string> warning;
};

/// null/null passes, null vs value fails, numbers need exact canonical
/// equality, text passes at similarity >= 0.95 and otherwise asks `judge`
/// (nullptr means borderline text fails). Judge errors propagate.
SlotMatch slot_match(const SlotValue& predicted, const SlotValue& gold, SlotKind kind, Judge* judge,
                     const JudgeContext& context);

/// Judge-free agreement test used by diagnostics.
bool values_agree(const SlotValue& predicted, const SlotValue& gold, SlotKind kind);

struct MatchDecision {
  std::size_t pred_index = 0;
  std::optional<std::size_t> gold_index;
  std::vector<SlotOutcome> outcomes;  // per slot; empty when unassigned
  double score = 0.0;                 // composite score of the assigned pair
  bool correct = false;
};

struct MatchReport {
  std::string query_id;
  std::string regime;
  std::vector<MatchDecision> decisions;  // one per prediction, in prediction order
  std::vector<std::size_t> unmatched_gold;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t judge_calls = 0;
  std::vector<std::string> judge_keys;
  std::vector<std::string> warnings;
};

/// Greedy one-to-one assignment. Candidates are restricted to equal doc_id,
/// ranked by mean per-slot similarity (numbers: 1 if equal, else 0) with ties
/// broken by (pred_index, gold_index). A pair is assigned only if every slot
/// passes slot_match; a failed pair leaves both sides available.
MatchReport match_tuples(const std::vector<StudyTuple>& predictions, const std::vector<StudyTuple>& gold,
                         Judge* judge, std::string regime = {});

nlohmann::json to_json(const MatchReport& report);
MatchReport match_report_from_json(const nlohmann::json& j);

}  // namespace evidx
