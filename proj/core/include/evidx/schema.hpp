#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/decimal.hpp"

namespace evidx {

using DocId = std::int64_t;

// ---------------------------------------------------------------------------
// Gold annotations
// ---------------------------------------------------------------------------

enum class Role { kIV, kDV };

std::string_view role_name(Role role);

struct VariableEntry {
  std::string name;
  Role role = Role::kIV;
  std::optional<std::string> scale;
  std::optional<std::string> unit;
};

enum class EffectFamily { kR, kBeta, kMultipleR, kR2, kOddsRatio, kOther };

struct EffectSize {
  EffectFamily family = EffectFamily::kOther;
  std::string label;  // as written in gold: "r", "beta", "R", "R2", "OR", or free text
  Decimal value;
};

EffectFamily effect_family_from_label(std::string_view label);

struct AssociationEntry {
  std::string iv;
  std::string dv;
  std::string method;
  std::optional<std::string> condition;
  EffectSize effect;
};

/// A co-reported (population, country, sample size) bundle. Gold stores these
/// explicitly so the binding queries score only pairs the study reports.
struct PopulationLink {
  std::string population;
  std::optional<std::string> geolocation;
  std::optional<Decimal> sample_size;
};

struct GoldRecord {
  DocId doc_id = 0;
  std::string doi;
  std::vector<std::string> populations;
  std::vector<std::string> geolocations;
  std::vector<Decimal> sample_sizes;
  std::vector<VariableEntry> variables;
  std::vector<AssociationEntry> associations;
  std::vector<PopulationLink> population_links;

  /// Sum of sample_sizes, or nullopt when none are reported.
  std::optional<Decimal> sample_size_total() const;
};

struct Violation {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool valid() const { return error_count() == 0; }
};

/// Checks one record against the schema invariants. Violations are data; the
/// function never throws for a parsed record.
ValidationReport validate_gold(const GoldRecord& record);

/// Validates every record plus corpus-wide rules (unique doc_id). Paths are
/// prefixed with "documents[k].".
ValidationReport validate_gold_set(const std::vector<GoldRecord>& records);

// ---------------------------------------------------------------------------
// Query registry
// ---------------------------------------------------------------------------

enum class Family { kObject, kMethod };
enum class Level { kL1, kL2, kC };

enum class Slot { kG, kN, kP, kA, kV, kIV, kDV, kS, kU, kC, kE, kCount, kValue };
enum class SlotKind { kText, kNumeric };

std::string_view slot_name(Slot slot);
std::optional<Slot> slot_from_name(std::string_view name);
SlotKind slot_kind(Slot slot);

/// How a query is scored.
enum class ScoringKind {
  kTupleList,       // list-style extraction, tuple-level P/R/F1
  kCorpusScalar,    // O_C_*: one number for the corpus
  kPerDocumentCount,// M_C_Q1..Q4: one count per document
  kTupleSet,        // M_C_Q5: filtered pair list scored as tuples
};

struct QuerySpec {
  std::string id;
  Family family = Family::kObject;
  Level level = Level::kL1;
  std::string pattern;      // display form, e.g. "(i, G)" or "(N → count)"
  std::vector<Slot> slots;  // output slots, document id excluded
  bool document_attributed = true;
  std::string text;

  /// Table group label: O1, O2, OC, M1, M2, MC.
  std::string group() const;
  ScoringKind scoring() const;
};

/// The closed registry of 24 queries, ordered O_L1, O_L2, O_C, M_L1, M_L2, M_C.
const std::vector<QuerySpec>& registry();

/// Throws InputError for unknown ids.
const QuerySpec& query_by_id(std::string_view id);

/// Group labels in report order.
const std::vector<std::string>& group_labels();

// ---------------------------------------------------------------------------
// Tuples
// ---------------------------------------------------------------------------

/// Null is distinct from the empty string and only matches null.
using SlotValue = std::variant<std::monostate, std::string, Decimal>;

bool is_null(const SlotValue& value);
std::string value_to_string(const SlotValue& value);  // "null" for null

struct Field {
  Slot slot;
  SlotValue value;

  friend bool operator==(const Field&, const Field&) = default;
};

struct StudyTuple {
  DocId doc_id = 0;
  std::string query_id;
  std::vector<Field> fields;

  const SlotValue* get(Slot slot) const;
  friend bool operator==(const StudyTuple&, const StudyTuple&) = default;
};

/// Identity key used for set semantics: normalized text, canonical numbers.
std::string tuple_identity(const StudyTuple& tuple);

/// {"doc": k, "<slot>": value, ...} in slot order. Numbers are emitted as JSON
/// numbers, null as null.
nlohmann::ordered_json tuple_to_json(const StudyTuple& tuple, bool with_doc = true);

/// Strict inverse of tuple_to_json for files this tool wrote. Throws
/// InputError on shape mismatch.
StudyTuple tuple_from_json(const nlohmann::json& object, const QuerySpec& query);

/// Gold tuple set for a list-style query, duplicates removed, in gold order.
/// Throws InputError for C-level queries; their ground truth is the oracle's.
std::vector<StudyTuple> project_gold(const GoldRecord& record, const QuerySpec& query);

/// Distinct values by normalized identity, first spelling wins.
std::vector<std::string> distinct_names(const std::vector<std::string>& names);

}  // namespace evidx
