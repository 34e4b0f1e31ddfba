#include "evidx/oracle.hpp"

#include <algorithm>
#include <set>

#include "evidx/error.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace {

__extension__ using i128 = __int128;

struct Sizes {
  std::vector<Decimal> values;
  std::vector<DocId> missing;
};

Sizes per_doc_sizes(const std::vector<GoldRecord>& gold) {
  Sizes s;
  for (const auto& r : gold) {
    if (auto total = r.sample_size_total()) s.values.push_back(*total);
    else s.missing.push_back(r.doc_id);
  }
  return s;
}

Rational add(const Rational& a, const Rational& b) {
  i128 num = static_cast<i128>(a.numerator()) * b.denominator() +
                 static_cast<i128>(b.numerator()) * a.denominator();
  i128 den = static_cast<i128>(a.denominator()) * b.denominator();
  // Reduce in 128 bits before narrowing.
  auto gcd = [](i128 x, i128 y) {
    if (x < 0) x = -x;
    while (y != 0) {
      i128 t = x % y;
      x = y;
      y = t;
    }
    return x;
  };
  i128 g = gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX) throw InputError("sample-size arithmetic overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t count_distinct(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& n : names) seen.insert(normalize(n));
  return static_cast<std::int64_t>(seen.size());
}

}  // namespace

std::string ScalarAnswer::coverage_note() const {
  std::string note = std::to_string(documents_used) + " of " +
                     std::to_string(documents_used + documents_missing.size()) + " documents report N";
  if (!documents_missing.empty()) {
    note += "; excluded:";
    for (DocId d : documents_missing) note += " [" + std::to_string(d) + "]";
  }
  return note;
}

std::int64_t oracle_count_gt(const std::vector<GoldRecord>& gold, const Decimal& threshold) {
  std::int64_t count = 0;
  for (const auto& r : gold) {
    auto total = r.sample_size_total();
    if (total && *total > threshold) ++count;
  }
  return count;
}

ScalarAnswer oracle_mean(const std::vector<GoldRecord>& gold) {
  Sizes s = per_doc_sizes(gold);
  ScalarAnswer a;
  a.documents_used = s.values.size();
  a.documents_missing = s.missing;
  if (s.values.empty()) return a;
  Rational sum;
  for (const auto& v : s.values) sum = add(sum, Rational::from_decimal(v));
  i128 den = static_cast<i128>(sum.denominator()) * static_cast<std::int64_t>(s.values.size());
  if (den > INT64_MAX) throw InputError("sample-size arithmetic overflow");
  a.value = Rational(sum.numerator(), static_cast<std::int64_t>(den));
  return a;
}

ScalarAnswer oracle_median(const std::vector<GoldRecord>& gold) {
  Sizes s = per_doc_sizes(gold);
  ScalarAnswer a;
  a.documents_used = s.values.size();
  a.documents_missing = s.missing;
  if (s.values.empty()) return a;
  std::sort(s.values.begin(), s.values.end());
  const std::size_t n = s.values.size();
  if (n % 2 == 1) {
    a.value = Rational::from_decimal(s.values[n / 2]);
  } else {
    Rational sum = add(Rational::from_decimal(s.values[n / 2 - 1]), Rational::from_decimal(s.values[n / 2]));
    a.value = Rational(sum.numerator(), sum.denominator() * 2);
  }
  return a;
}

std::vector<std::pair<DocId, std::int64_t>> oracle_per_doc_counts(const std::vector<GoldRecord>& gold,
                                                                  CountKind kind) {
  std::vector<std::pair<DocId, std::int64_t>> out;
  for (const auto& r : gold) {
    std::vector<std::string> names;
    if (kind == CountKind::kMethods) {
      for (const auto& a : r.associations) names.push_back(a.method);
    } else {
      for (const auto& v : r.variables) {
        if (kind == CountKind::kIV && v.role != Role::kIV) continue;
        if (kind == CountKind::kDV && v.role != Role::kDV) continue;
        names.push_back(v.name);
      }
    }
    out.emplace_back(r.doc_id, count_distinct(names));
  }
  return out;
}

std::vector<StudyTuple> oracle_strong_pairs(const std::vector<GoldRecord>& gold, const Decimal& threshold,
                                            bool absolute) {
  std::vector<StudyTuple> out;
  for (const auto& r : gold) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& a : r.associations) {
      Decimal e = a.effect.value;
      if (absolute && e < Decimal()) e = -e;
      if (!(e > threshold)) continue;
      if (!seen.emplace(normalize(a.iv), normalize(a.dv)).second) continue;
      StudyTuple t;
      t.doc_id = r.doc_id;
      t.query_id = "M_C_Q5";
      t.fields = {{Slot::kIV, a.iv}, {Slot::kDV, a.dv}, {Slot::kE, a.effect.value}};
      out.push_back(std::move(t));
    }
  }
  return out;
}

DerivedAnswer oracle_answer(const QuerySpec& query, const std::vector<GoldRecord>& gold, bool absolute_effects) {
  DerivedAnswer a;
  a.query_id = query.id;
  a.kind = query.scoring();
  const std::string& id = query.id;
  if (id == "O_C_Q1") {
    ScalarAnswer s = oracle_mean(gold);  // coverage bookkeeping only
    a.scalar.documents_used = s.documents_used;
    a.scalar.documents_missing = s.documents_missing;
    a.scalar.value = Rational(oracle_count_gt(gold), 1);
  } else if (id == "O_C_Q2") {
    a.scalar = oracle_mean(gold);
  } else if (id == "O_C_Q3") {
    a.scalar = oracle_median(gold);
  } else if (id == "M_C_Q1") {
    a.per_doc = oracle_per_doc_counts(gold, CountKind::kMethods);
  } else if (id == "M_C_Q2") {
    a.per_doc = oracle_per_doc_counts(gold, CountKind::kVariables);
  } else if (id == "M_C_Q3") {
    a.per_doc = oracle_per_doc_counts(gold, CountKind::kIV);
  } else if (id == "M_C_Q4") {
    a.per_doc = oracle_per_doc_counts(gold, CountKind::kDV);
  } else if (id == "M_C_Q5") {
    a.tuples = oracle_strong_pairs(gold, *Decimal::parse("0.7"), absolute_effects);
  } else {
    throw InputError(id + " is not a derived query");
  }
  return a;
}

std::string scalar_display(const Rational& value) { return value.to_decimal(6).to_string(); }

nlohmann::json to_json(const DerivedAnswer& answer) {
  nlohmann::json j;
  j["query_id"] = answer.query_id;
  switch (answer.kind) {
    case ScoringKind::kCorpusScalar:
      j["scope"] = "corpus";
      if (answer.scalar.value) {
        j["value"] = scalar_display(*answer.scalar.value);
        j["exact"] = answer.scalar.value->to_string();
      } else {
        j["value"] = nullptr;
        j["exact"] = nullptr;
      }
      j["coverage"] = answer.scalar.coverage_note();
      break;
    case ScoringKind::kPerDocumentCount:
      j["scope"] = "per-document";
      j["values"] = nlohmann::json::array();
      for (const auto& [doc, count] : answer.per_doc) j["values"].push_back({{"doc", doc}, {"count", count}});
      break;
    case ScoringKind::kTupleSet:
    case ScoringKind::kTupleList:
      j["scope"] = "per-document";
      j["values"] = nlohmann::json::array();
      for (const auto& t : answer.tuples) j["values"].push_back(nlohmann::json(tuple_to_json(t)));
      break;
  }
  return j;
}

nlohmann::json oracle_report(const std::vector<GoldRecord>& gold, bool absolute_effects) {
  nlohmann::json report = nlohmann::json::object();
  for (const auto& q : registry()) {
    if (q.level != Level::kC) continue;
    report[q.id] = to_json(oracle_answer(q, gold, absolute_effects));
  }
  return report;
}

}  // namespace evidx
