#include "evidx/metrics.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "evidx/error.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace {

std::string_view kind_name(ScoringKind kind) {
  switch (kind) {
    case ScoringKind::kTupleList: return "tuple-list";
    case ScoringKind::kCorpusScalar: return "corpus-scalar";
    case ScoringKind::kPerDocumentCount: return "per-document-count";
    case ScoringKind::kTupleSet: return "tuple-set";
  }
  return "tuple-list";
}

ScoringKind kind_from_name(const std::string& name) {
  for (ScoringKind k : {ScoringKind::kTupleList, ScoringKind::kCorpusScalar, ScoringKind::kPerDocumentCount,
                        ScoringKind::kTupleSet}) {
    if (kind_name(k) == name) return k;
  }
  throw InputError("unknown scoring kind '" + name + "'");
}

std::optional<Decimal> numeric_value(const SlotValue& v) {
  if (const auto* d = std::get_if<Decimal>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return Decimal::parse_lenient(*s);
  return std::nullopt;
}

StudyTuple project(const StudyTuple& t, const std::vector<Slot>& slots) {
  StudyTuple out;
  out.doc_id = t.doc_id;
  out.query_id = t.query_id;
  for (Slot s : slots) {
    const SlotValue* v = t.get(s);
    out.fields.push_back({s, v ? *v : SlotValue{}});
  }
  return out;
}

std::vector<Slot> slots_of(const std::vector<StudyTuple>& tuples, const std::vector<Slot>& fallback) {
  if (tuples.empty()) return fallback;
  std::vector<Slot> slots;
  for (const auto& f : tuples.front().fields) slots.push_back(f.slot);
  return slots;
}

nlohmann::json tuples_json(const std::vector<StudyTuple>& tuples) {
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

nlohmann::json slot_names(const std::vector<Slot>& slots) {
  nlohmann::json arr = nlohmann::json::array();
  for (Slot s : slots) arr.push_back(std::string(slot_name(s)));
  return arr;
}

std::vector<Slot> slots_from(const nlohmann::json& arr) {
  std::vector<Slot> out;
  for (const auto& n : arr) {
    auto s = slot_from_name(n.get<std::string>());
    if (!s) throw InputError("unknown slot " + n.dump());
    out.push_back(*s);
  }
  return out;
}

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s), 1);
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw InputError("malformed rational '" + s + "'");
  }
}

}  // namespace

PRF prf(std::size_t correct, std::size_t predicted, std::size_t gold) {
  assert(correct <= predicted && correct <= gold);
  PRF r;
  if (predicted > 0) r.precision = static_cast<double>(correct) / static_cast<double>(predicted);
  if (gold > 0) r.recall = static_cast<double>(correct) / static_cast<double>(gold);
  if (r.precision + r.recall > 0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

PRF macro_average(const std::vector<PRF>& children) {
  PRF r;
  if (children.empty()) return r;
  for (const auto& c : children) {
    r.precision += c.precision;
    r.recall += c.recall;
    r.f1 += c.f1;
  }
  const double n = static_cast<double>(children.size());
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  return r;
}

bool score_derived(const std::optional<SlotValue>& predicted, const std::optional<Rational>& oracle) {
  if (!predicted || !oracle) return false;
  auto value = numeric_value(*predicted);
  if (!value) return false;
  return numerically_equal(*value, *oracle);
}

QueryScore score_tuple_list(const QuerySpec& query, const std::string& regime, std::vector<StudyTuple> predictions,
                            std::vector<StudyTuple> gold, Judge* judge) {
  QueryScore s;
  s.query_id = query.id;
  s.regime = regime;
  s.kind = ScoringKind::kTupleList;
  MatchReport report = match_tuples(predictions, gold, judge, regime);
  report.query_id = query.id;
  s.correct = report.correct;
  s.predicted = report.predicted;
  s.gold = report.gold;
  s.prf = prf(s.correct, s.predicted, s.gold);
  s.warnings = report.warnings;
  s.predictions = std::move(predictions);
  s.gold_tuples = std::move(gold);
  s.match = std::move(report);
  return s;
}

QueryScore score_corpus_scalar(const QuerySpec& query, const std::string& regime,
                               const std::optional<SlotValue>& predicted, const DerivedAnswer& oracle) {
  QueryScore s;
  s.query_id = query.id;
  s.regime = regime;
  s.kind = ScoringKind::kCorpusScalar;
  const bool answered = predicted && !is_null(*predicted);
  const bool correct = answered && score_derived(predicted, oracle.scalar.value);
  s.predicted = answered ? 1 : 0;
  s.gold = 1;
  s.correct = correct ? 1 : 0;
  s.prf = prf(s.correct, s.predicted, s.gold);
  s.success = correct ? 1.0 : 0.0;
  if (answered) s.predicted_scalar = *predicted;
  s.oracle_scalar = oracle.scalar.value;
  if (!oracle.scalar.value) s.warnings.push_back("oracle value undefined: " + oracle.scalar.coverage_note());
  if (predicted && !is_null(*predicted) && !numeric_value(*predicted)) {
    s.warnings.push_back("unparseable scalar answer: " + value_to_string(*predicted));
  }
  return s;
}

QueryScore score_per_document_counts(const QuerySpec& query, const std::string& regime,
                                     std::vector<StudyTuple> predictions, const DerivedAnswer& oracle) {
  std::vector<StudyTuple> first;
  std::set<DocId> seen;
  std::vector<std::string> warnings;
  for (auto& t : predictions) {
    if (seen.insert(t.doc_id).second) first.push_back(project(t, {Slot::kCount}));
    else warnings.push_back("duplicate answer for document [" + std::to_string(t.doc_id) + "] ignored");
  }
  std::vector<StudyTuple> gold;
  for (const auto& [doc, count] : oracle.per_doc) {
    gold.push_back({doc, query.id, {{Slot::kCount, Decimal::from_int(count)}}});
  }
  QueryScore s = score_tuple_list(query, regime, std::move(first), std::move(gold), nullptr);
  s.kind = ScoringKind::kPerDocumentCount;
  s.warnings.insert(s.warnings.end(), warnings.begin(), warnings.end());
  s.success = s.gold == 0 ? (s.predicted == 0 ? 1.0 : 0.0)
                          : static_cast<double>(s.correct) / static_cast<double>(s.gold);
  return s;
}

QueryScore score_strong_pairs(const QuerySpec& query, const std::string& regime, std::vector<StudyTuple> predictions,
                              const DerivedAnswer& oracle, Judge* judge) {
  const std::vector<Slot> pair{Slot::kIV, Slot::kDV};
  std::vector<StudyTuple> preds, gold;
  for (const auto& t : predictions) preds.push_back(project(t, pair));
  for (const auto& t : oracle.tuples) gold.push_back(project(t, pair));
  QueryScore s = score_tuple_list(query, regime, std::move(preds), std::move(gold), judge);
  s.kind = ScoringKind::kTupleSet;
  s.success = s.correct == s.gold && s.correct == s.predicted ? 1.0 : 0.0;
  return s;
}

nlohmann::json to_json(const PRF& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

nlohmann::json to_json(const QueryScore& s) {
  const QuerySpec& q = query_by_id(s.query_id);
  nlohmann::json j;
  j["query_id"] = s.query_id;
  j["regime"] = s.regime;
  j["kind"] = kind_name(s.kind);
  j["counts"] = {{"correct", s.correct}, {"predicted", s.predicted}, {"gold", s.gold}};
  j["prf"] = to_json(s.prf);
  j["success"] = s.success ? nlohmann::json(*s.success) : nlohmann::json(nullptr);
  j["warnings"] = s.warnings;
  j["prediction_slots"] = slot_names(slots_of(s.predictions, q.slots));
  j["gold_slots"] = slot_names(slots_of(s.gold_tuples, q.slots));
  j["predictions"] = tuples_json(s.predictions);
  j["gold"] = tuples_json(s.gold_tuples);
  j["match"] = s.match ? to_json(*s.match) : nlohmann::json(nullptr);
  if (s.predicted_scalar) {
    if (const auto* d = std::get_if<Decimal>(&*s.predicted_scalar)) j["predicted_scalar"] = {{"number", d->to_string()}};
    else j["predicted_scalar"] = {{"text", value_to_string(*s.predicted_scalar)}};
  } else {
    j["predicted_scalar"] = nullptr;
  }
  if (s.oracle_scalar) {
    j["oracle_scalar"] = {{"exact", s.oracle_scalar->to_string()}, {"display", scalar_display(*s.oracle_scalar)}};
  } else {
    j["oracle_scalar"] = nullptr;
  }
  return j;
}

QueryScore query_score_from_json(const nlohmann::json& j) {
  QueryScore s;
  try {
    s.query_id = j.at("query_id").get<std::string>();
    s.regime = j.at("regime").get<std::string>();
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    s.correct = j.at("counts").at("correct").get<std::size_t>();
    s.predicted = j.at("counts").at("predicted").get<std::size_t>();
    s.gold = j.at("counts").at("gold").get<std::size_t>();
    s.prf = {j.at("prf").at("precision").get<double>(), j.at("prf").at("recall").get<double>(),
             j.at("prf").at("f1").get<double>()};
    if (!j.at("success").is_null()) s.success = j.at("success").get<double>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    s.predictions = tuples_from(j.at("predictions"), s.query_id, slots_from(j.at("prediction_slots")));
    s.gold_tuples = tuples_from(j.at("gold"), s.query_id, slots_from(j.at("gold_slots")));
    if (!j.at("match").is_null()) s.match = match_report_from_json(j.at("match"));
    const auto& ps = j.at("predicted_scalar");
    if (!ps.is_null()) {
      if (ps.contains("number")) {
        auto d = Decimal::parse(ps.at("number").get<std::string>());
        if (!d) throw InputError("malformed predicted_scalar");
        s.predicted_scalar = SlotValue{*d};
      } else {
        s.predicted_scalar = SlotValue{ps.at("text").get<std::string>()};
      }
    }
    if (!j.at("oracle_scalar").is_null()) s.oracle_scalar = parse_rational(j.at("oracle_scalar").at("exact"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed score file: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rollups
// ---------------------------------------------------------------------------

CellRollup rollup_cell(CellKey key, const std::map<std::string, PRF>& query_scores) {
  CellRollup r;
  r.key = std::move(key);
  std::map<std::string, std::vector<PRF>> by_group;
  std::vector<PRF> all;
  for (const auto& q : registry()) {
    auto it = query_scores.find(q.id);
    if (it == query_scores.end()) {
      r.missing.push_back(q.id);
      continue;
    }
    r.queries[q.id] = it->second;
    by_group[q.group()].push_back(it->second);
    all.push_back(it->second);
  }
  for (const auto& [id, _] : query_scores) {
    query_by_id(id);  // rejects unknown ids
  }
  std::vector<PRF> groups;
  for (const auto& g : group_labels()) {
    auto it = by_group.find(g);
    if (it == by_group.end()) continue;
    r.groups[g] = macro_average(it->second);
    groups.push_back(r.groups[g]);
  }
  r.all_queries = macro_average(all);
  r.all_groups = macro_average(groups);
  r.partial = !r.missing.empty();
  return r;
}

std::vector<CellRollup> average_over_domains(const std::vector<CellRollup>& cells) {
  struct Acc {
    std::map<std::string, std::vector<PRF>> queries, groups;
    std::vector<PRF> all_q, all_g;
    bool partial = false;
    std::set<std::string> missing;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& c : cells) {
    auto k = std::make_pair(c.key.model, c.key.regime);
    if (!acc.contains(k)) order.push_back(k);
    Acc& a = acc[k];
    for (const auto& [id, p] : c.queries) a.queries[id].push_back(p);
    for (const auto& [g, p] : c.groups) a.groups[g].push_back(p);
    a.all_q.push_back(c.all_queries);
    a.all_g.push_back(c.all_groups);
    a.partial = a.partial || c.partial;
    a.missing.insert(c.missing.begin(), c.missing.end());
  }
  std::vector<CellRollup> out;
  for (const auto& k : order) {
    const Acc& a = acc[k];
    CellRollup r;
    r.key = {"average", k.first, k.second};
    for (const auto& [id, v] : a.queries) r.queries[id] = macro_average(v);
    for (const auto& [g, v] : a.groups) r.groups[g] = macro_average(v);
    r.all_queries = macro_average(a.all_q);
    r.all_groups = macro_average(a.all_g);
    r.partial = a.partial;
    r.missing.assign(a.missing.begin(), a.missing.end());
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const CellRollup& r) {
  nlohmann::json j;
  j["domain"] = r.key.domain;
  j["model"] = r.key.model;
  j["regime"] = r.key.regime;
  j["queries"] = nlohmann::json::object();
  for (const auto& [id, p] : r.queries) j["queries"][id] = to_json(p);
  j["groups"] = nlohmann::json::object();
  for (const auto& [g, p] : r.groups) j["groups"][g] = to_json(p);
  j["all_query_macro"] = to_json(r.all_queries);
  j["all_group_macro"] = to_json(r.all_groups);
  j["partial"] = r.partial;
  j["missing"] = r.missing;
  return j;
}

std::string format_2dp(double value) {
  const long long hundredths = std::llround(value * 100.0);
  const long long mag = hundredths < 0 ? -hundredths : hundredths;
  std::string out = hundredths < 0 ? "-" : "";
  out += std::to_string(mag / 100) + ".";
  const long long frac = mag % 100;
  if (frac < 10) out += "0";
  out += std::to_string(frac);
  return out;
}

std::string format_table_cell(double value) {
  std::string s = format_2dp(value);
  if (s == "1.00") return "1.0";
  if (s.starts_with("0.")) return s.substr(1);
  return s;
}

std::vector<DeltaRow> regime_delta(const std::vector<CellRollup>& cells, AllLevel level) {
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& c : cells) {
    auto k = std::make_pair(c.key.domain, c.key.model);
    if (!values.contains(k)) order.push_back(k);
    values[k][c.key.regime] = level == AllLevel::kQueries ? c.all_queries.f1 : c.all_groups.f1;
  }
  std::vector<DeltaRow> rows;
  for (const auto& k : order) {
    const auto& v = values[k];
    if (!v.contains("per-paper") || !v.contains("global")) {
      throw InputError("regime delta needs both regimes for " + k.first + "/" + k.second);
    }
    DeltaRow row{k.first, k.second, v.at("per-paper"), v.at("global"), 0.0};
    row.drop = static_cast<double>(std::llround(row.per_paper_f1 * 100.0) - std::llround(row.global_f1 * 100.0)) / 100.0;
    rows.push_back(row);
  }
  return rows;
}

std::string regime_delta_csv(const std::vector<DeltaRow>& rows) {
  std::string out = "domain,model,per_paper_f1,global_f1,drop\n";
  for (const auto& r : rows) {
    out += r.domain + "," + r.model + "," + format_2dp(r.per_paper_f1) + "," + format_2dp(r.global_f1) + "," +
           format_2dp(r.drop) + "\n";
  }
  return out;
}

std::string rollup_markdown(const std::vector<CellRollup>& cells) {
  std::map<std::pair<std::string, std::string>, std::map<std::string, const CellRollup*>> rows;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& c : cells) {
    auto k = std::make_pair(c.key.domain, c.key.model);
    if (!rows.contains(k)) order.push_back(k);
    rows[k][c.key.regime] = &c;
  }
  const std::vector<std::string> regimes{"per-paper", "global"};
  std::string out = "| Domain | Model |";
  std::string rule = "|---|---|";
  for (const auto& regime : regimes) {
    for (const auto& g : group_labels()) {
      out += " " + std::string(regime == "per-paper" ? "PP " : "GL ") + g + " |";
      rule += "---|";
    }
    out += std::string(" ") + (regime == "per-paper" ? "PP" : "GL") + " All |";
    out += std::string(" ") + (regime == "per-paper" ? "PP" : "GL") + " All (groups) |";
    rule += "---|---|";
  }
  out += "\n" + rule + "\n";
  bool any_partial = false;
  for (const auto& k : order) {
    out += "| " + k.first + " | " + k.second + " |";
    for (const auto& regime : regimes) {
      auto it = rows[k].find(regime);
      if (it == rows[k].end()) {
        for (std::size_t i = 0; i < group_labels().size() + 2; ++i) out += " - |";
        continue;
      }
      const CellRollup& c = *it->second;
      for (const auto& g : group_labels()) {
        auto gi = c.groups.find(g);
        out += " " + (gi == c.groups.end() ? std::string("-") : format_table_cell(gi->second.f1)) + " |";
      }
      std::string mark = c.partial ? "*" : "";
      any_partial = any_partial || c.partial;
      out += " " + format_table_cell(c.all_queries.f1) + mark + " |";
      out += " " + format_table_cell(c.all_groups.f1) + mark + " |";
    }
    out += "\n";
  }
  out += "\nPP = per-paper, GL = global. All = mean over query F1; All (groups) = mean over group F1.\n";
  if (any_partial) out += "* partial: some query scores are missing.\n";
  return out;
}

std::string per_query_csv(const std::vector<std::pair<CellKey, QueryScore>>& scores) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "domain,model,regime,query_id,group,correct,predicted,gold,precision,recall,f1,success\n";
  for (const auto& [key, s] : scores) {
    out << key.domain << ',' << key.model << ',' << key.regime << ',' << s.query_id << ','
        << query_by_id(s.query_id).group() << ',' << s.correct << ',' << s.predicted << ',' << s.gold << ','
        << s.prf.precision << ',' << s.prf.recall << ',' << s.prf.f1 << ',';
    if (s.success) out << *s.success;
    out << '\n';
  }
  return out.str();
}

}  // namespace evidx
