#include <algorithm>

#include "evidx/error.hpp"
#include "evidx/schema.hpp"

namespace evidx {
namespace {

QuerySpec make(std::string id, Family family, Level level, std::string pattern, std::vector<Slot> slots,
               std::string text, bool attributed = true) {
  QuerySpec q;
  q.id = std::move(id);
  q.family = family;
  q.level = level;
  q.pattern = std::move(pattern);
  q.slots = std::move(slots);
  q.document_attributed = attributed;
  q.text = std::move(text);
  return q;
}

std::vector<QuerySpec> build_registry() {
  using enum Slot;
  const Family O = Family::kObject;
  const Family M = Family::kMethod;
  return {
      make("O_L1_Q1", O, Level::kL1, "(i, G)", {kG}, "Extract the study geolocation as a country name."),
      make("O_L1_Q2", O, Level::kL1, "(i, N)", {kN}, "Extract the reported sample size (use null if unavailable)."),
      make("O_L1_Q3", O, Level::kL1, "(i, P)", {kP}, "Extract the study population or unit of analysis."),
      make("O_L2_Q1", O, Level::kL2, "(i, P, N)", {kP, kN},
           "Extract each study population together with its sample size."),
      make("O_L2_Q2", O, Level::kL2, "(i, P, G)", {kP, kG},
           "Extract each study population together with the study country."),
      make("O_L2_Q3", O, Level::kL2, "(i, P, G, N)", {kP, kG, kN},
           "Extract each study population with both country and sample size."),
      make("O_C_Q1", O, Level::kC, "(N → count)", {kValue}, "Count documents with N > 100.", false),
      make("O_C_Q2", O, Level::kC, "(N → mean)", {kValue}, "Compute the mean of N across all documents.", false),
      make("O_C_Q3", O, Level::kC, "(N → median)", {kValue}, "Compute the median of N across all documents.",
           false),
      make("M_L1_Q1", M, Level::kL1, "(i, A)", {kA}, "Extract the statistical method used to quantify associations."),
      make("M_L1_Q2", M, Level::kL1, "(i, V)", {kV}, "Extract all variables."),
      make("M_L1_Q3", M, Level::kL1, "(i, IV)", {kIV}, "Extract all independent variables."),
      make("M_L1_Q4", M, Level::kL1, "(i, DV)", {kDV}, "Extract all dependent variables."),
      make("M_L2_Q1", M, Level::kL2, "(i, V, S, U)", {kV, kS, kU},
           "Extract each variable together with its Scale and Unit."),
      make("M_L2_Q2", M, Level::kL2, "(i, IV, S, U)", {kIV, kS, kU},
           "Extract each independent variable with its Scale and Unit."),
      make("M_L2_Q3", M, Level::kL2, "(i, DV, S, U)", {kDV, kS, kU},
           "Extract each dependent variable together with its Scale and Unit."),
      make("M_L2_Q4", M, Level::kL2, "(i, IV, DV)", {kIV, kDV}, "Extract independent–dependent variable pairs."),
      make("M_L2_Q5", M, Level::kL2, "(i, IV, DV, A)", {kIV, kDV, kA},
           "Extract variable pairs together with the statistical method."),
      make("M_L2_Q6", M, Level::kL2, "(i, IV, DV, A, C, E)", {kIV, kDV, kA, kC, kE},
           "Extract variable pairs, statistical method, effect size (conditions)."),
      make("M_C_Q1", M, Level::kC, "(i, A → count)", {kCount}, "For each document, count reported statistical methods."),
      make("M_C_Q2", M, Level::kC, "(i, V → count)", {kCount},
           "For each document, count unique variables (union of IV and DV)."),
      make("M_C_Q3", M, Level::kC, "(i, IV → count)", {kCount}, "For each document, count independent variables."),
      make("M_C_Q4", M, Level::kC, "(i, DV → count)", {kCount}, "For each document, count dependent variables."),
      make("M_C_Q5", M, Level::kC, "(i, IV, DV, E)", {kIV, kDV, kE}, "List (IV, DV) pairs with E > 0.7."),
  };
}

}  // namespace

std::string QuerySpec::group() const {
  std::string g = family == Family::kObject ? "O" : "M";
  switch (level) {
    case Level::kL1: return g + "1";
    case Level::kL2: return g + "2";
    case Level::kC: return g + "C";
  }
  return g;
}

ScoringKind QuerySpec::scoring() const {
  if (level != Level::kC) return ScoringKind::kTupleList;
  if (family == Family::kObject) return ScoringKind::kCorpusScalar;
  if (id == "M_C_Q5") return ScoringKind::kTupleSet;
  return ScoringKind::kPerDocumentCount;
}

const std::vector<QuerySpec>& registry() {
  static const std::vector<QuerySpec> specs = build_registry();
  return specs;
}

const QuerySpec& query_by_id(std::string_view id) {
  const auto& specs = registry();
  auto it = std::find_if(specs.begin(), specs.end(), [&](const QuerySpec& q) { return q.id == id; });
  if (it == specs.end()) throw InputError("unknown query id '" + std::string(id) + "'");
  return *it;
}

const std::vector<std::string>& group_labels() {
  static const std::vector<std::string> labels{"O1", "O2", "OC", "M1", "M2", "MC"};
  return labels;
}

}  // namespace evidx
