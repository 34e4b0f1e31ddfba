#include "evidx/error_analysis.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace evidx {
namespace {

bool fields_agree(const StudyTuple& pred, const StudyTuple& gold, const std::vector<Slot>& slots) {
  for (Slot s : slots) {
    const SlotValue* p = pred.get(s);
    const SlotValue* g = gold.get(s);
    if (!p || !g || !values_agree(*p, *g, slot_kind(s))) return false;
  }
  return true;
}

StudyTuple exchanged(const StudyTuple& t) {
  StudyTuple out = t;
  for (Field& f : out.fields) {
    if (f.slot == Slot::kIV) f.value = *t.get(Slot::kDV);
    else if (f.slot == Slot::kDV) f.value = *t.get(Slot::kIV);
  }
  return out;
}

std::vector<Slot> compared_slots(const std::string& query_id, const StudyTuple& t) {
  if (query_id == "M_L2_Q6") return {Slot::kIV, Slot::kDV};
  std::vector<Slot> slots;
  for (const Field& f : t.fields) slots.push_back(f.slot);
  return slots;
}

std::vector<std::size_t> spurious(const QueryScore& s) {
  std::vector<std::size_t> out;
  if (!s.match) return out;
  for (const auto& d : s.match->decisions) {
    if (!d.correct) out.push_back(d.pred_index);
  }
  return out;
}

using InstanceKey = std::tuple<CellKey, std::string, std::size_t>;

std::set<InstanceKey> swap_keys(const std::vector<ScoredQuery>& scores) {
  std::set<InstanceKey> keys;
  for (const auto& inst : detect_role_swaps(scores).instances) keys.emplace(inst.cell, inst.query_id, inst.pred_index);
  return keys;
}

}  // namespace

double Classification::ratio() const {
  return denominator == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(denominator);
}

std::string format_percent(std::size_t count, std::size_t denominator) {
  if (denominator == 0) return "n/a";
  const unsigned long long c = count, d = denominator;
  const unsigned long long tenths = (2000ULL * c + d) / (2ULL * d);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

Classification detect_role_swaps(const std::vector<ScoredQuery>& scores) {
  static const std::set<std::string> scope{"M_L2_Q4", "M_L2_Q5", "M_L2_Q6"};
  Classification c;
  for (const auto& sq : scores) {
    const QueryScore& s = sq.score;
    if (!scope.contains(s.query_id) || !s.match) continue;
    std::set<std::size_t> open(s.match->unmatched_gold.begin(), s.match->unmatched_gold.end());
    for (std::size_t p : spurious(s)) {
      ++c.denominator;
      const StudyTuple& pred = s.predictions.at(p);
      if (!pred.get(Slot::kIV) || !pred.get(Slot::kDV)) continue;
      const StudyTuple swapped = exchanged(pred);
      const std::vector<Slot> slots = compared_slots(s.query_id, pred);
      for (std::size_t g : open) {
        const StudyTuple& gold = s.gold_tuples.at(g);
        if (gold.doc_id != pred.doc_id || !fields_agree(swapped, gold, slots)) continue;
        ++c.count;
        c.instances.push_back({sq.cell, s.query_id, p, g, pred.doc_id});
        open.erase(g);
        break;
      }
    }
  }
  return c;
}

Classification detect_binding_drift(const std::vector<ScoredQuery>& scores) {
  static const std::set<std::string> scope{"M_L2_Q5", "M_L2_Q6"};
  const std::set<InstanceKey> swaps = swap_keys(scores);
  const std::vector<Slot> pair{Slot::kIV, Slot::kDV};
  Classification c;
  for (const auto& sq : scores) {
    const QueryScore& s = sq.score;
    if (!scope.contains(s.query_id) || s.regime != "per-paper" || !s.match) continue;
    for (std::size_t p : spurious(s)) {
      ++c.denominator;
      if (swaps.contains({sq.cell, s.query_id, p})) continue;
      const StudyTuple& pred = s.predictions.at(p);
      std::vector<Slot> rest;
      for (const Field& f : pred.fields) {
        if (f.slot != Slot::kIV && f.slot != Slot::kDV) rest.push_back(f.slot);
      }
      std::optional<std::size_t> pair_hit;
      bool bound_elsewhere = false;
      for (std::size_t g = 0; g < s.gold_tuples.size(); ++g) {
        const StudyTuple& gold = s.gold_tuples[g];
        if (gold.doc_id != pred.doc_id || !fields_agree(pred, gold, pair)) continue;
        if (!pair_hit) pair_hit = g;
        if (fields_agree(pred, gold, rest)) {
          bound_elsewhere = true;
          break;
        }
      }
      if (pair_hit && !bound_elsewhere) {
        ++c.count;
        c.instances.push_back({sq.cell, s.query_id, p, pair_hit, pred.doc_id});
      }
    }
  }
  return c;
}

DensityReport recall_by_density(const std::vector<std::pair<const QueryScore*, std::vector<DocId>>>& cells) {
  struct Range {
    std::string label;
    std::size_t lo, hi;
  };
  const std::vector<Range> ranges{{"0", 0, 0},     {"1-5", 1, 5},     {"6-10", 6, 10},
                                  {"11-20", 11, 20}, {"21-30", 21, 30}, {">=31", 31, SIZE_MAX}};
  std::vector<std::vector<double>> recalls(ranges.size());
  std::vector<std::size_t> papers(ranges.size(), 0);
  for (const auto& [score, documents] : cells) {
    std::map<DocId, std::size_t> gold_count, hit_count;
    for (DocId d : documents) gold_count[d] = 0;
    for (const auto& g : score->gold_tuples) ++gold_count[g.doc_id];
    if (score->match) {
      for (const auto& d : score->match->decisions) {
        if (d.correct && d.gold_index) ++hit_count[score->gold_tuples.at(*d.gold_index).doc_id];
      }
    }
    for (const auto& [doc, n] : gold_count) {
      for (std::size_t r = 0; r < ranges.size(); ++r) {
        if (n < ranges[r].lo || n > ranges[r].hi) continue;
        ++papers[r];
        if (n > 0) recalls[r].push_back(static_cast<double>(hit_count[doc]) / static_cast<double>(n));
        break;
      }
    }
  }
  DensityReport report;
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    if (papers[r] == 0) {
      report.notes.push_back("bucket " + ranges[r].label + " is empty and omitted");
      continue;
    }
    DensityBucket b{ranges[r].label, papers[r], std::nullopt};
    if (!recalls[r].empty()) {
      double sum = 0.0;
      for (double v : recalls[r]) sum += v;
      b.mean_recall = sum / static_cast<double>(recalls[r].size());
    }
    report.buckets.push_back(std::move(b));
  }
  if (!report.buckets.empty() && report.buckets.front().label == "0") {
    report.notes.push_back("bucket 0 holds documents without gold tuples; recall is undefined there");
  }
  return report;
}

const std::map<std::string, std::string>& amplification_upstream() {
  static const std::map<std::string, std::string> m{
      {"O_C_Q1", "O_L1_Q2"}, {"O_C_Q2", "O_L1_Q2"}, {"O_C_Q3", "O_L1_Q2"}, {"M_C_Q1", "M_L1_Q1"},
      {"M_C_Q2", "M_L1_Q2"}, {"M_C_Q3", "M_L1_Q3"}, {"M_C_Q4", "M_L1_Q4"}, {"M_C_Q5", "M_L2_Q6"},
  };
  return m;
}

std::vector<AmplificationRow> amplification_report(const std::vector<ScoredQuery>& scores) {
  std::map<CellKey, std::map<std::string, const QueryScore*>> cells;
  for (const auto& sq : scores) cells[sq.cell][sq.score.query_id] = &sq.score;
  std::vector<AmplificationRow> rows;
  for (const auto& q : registry()) {
    auto up = amplification_upstream().find(q.id);
    if (up == amplification_upstream().end()) continue;
    AmplificationRow row{q.id, up->second};
    double success = 0.0, f1 = 0.0;
    bool seen = false;
    for (const auto& [key, by_query] : cells) {
      auto d = by_query.find(q.id);
      auto u = by_query.find(up->second);
      if (d == by_query.end() && u == by_query.end()) continue;
      seen = true;
      if (d == by_query.end() || u == by_query.end() || !d->second->success) {
        row.partial = true;
        continue;
      }
      ++row.cells;
      success += *d->second->success;
      f1 += u->second->prf.f1;
    }
    if (!seen) continue;
    if (row.cells > 0) {
      row.success_rate = success / static_cast<double>(row.cells);
      row.upstream_f1 = f1 / static_cast<double>(row.cells);
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

nlohmann::json to_json(const Classification& c) {
  nlohmann::json j;
  j["count"] = c.count;
  j["denominator"] = c.denominator;
  j["ratio"] = c.ratio();
  j["display"] = format_percent(c.count, c.denominator);
  j["instances"] = nlohmann::json::array();
  for (const auto& i : c.instances) {
    j["instances"].push_back({{"domain", i.cell.domain},
                              {"model", i.cell.model},
                              {"regime", i.cell.regime},
                              {"query_id", i.query_id},
                              {"pred_index", i.pred_index},
                              {"gold_index", i.gold_index ? nlohmann::json(*i.gold_index) : nlohmann::json(nullptr)},
                              {"doc", i.doc_id}});
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const TaxonomyReport& r) {
  nlohmann::json j;
  j["role_swaps"] = to_json(r.swaps);
  j["binding_drift"] = to_json(r.drift);
  j["density"]["buckets"] = nlohmann::json::array();
  for (const auto& b : r.density.buckets) {
    j["density"]["buckets"].push_back({{"range", b.label},
                                       {"papers", b.papers},
                                       {"mean_recall", b.mean_recall ? nlohmann::json(*b.mean_recall) : nlohmann::json(nullptr)}});
  }
  j["density"]["notes"] = r.density.notes;
  j["amplification"] = nlohmann::json::array();
  for (const auto& a : r.amplification) {
    j["amplification"].push_back({{"derived_query", a.derived_query},
                                  {"upstream_query", a.upstream_query},
                                  {"cells", a.cells},
                                  {"success_rate", a.success_rate},
                                  {"upstream_f1", a.upstream_f1},
                                  {"partial", a.partial}});
  }
  return j;
}

std::string taxonomy_markdown(const TaxonomyReport& r) {
  std::string out;
  out += "## Role swaps\n\n";
  out += std::to_string(r.swaps.count) + " of " + std::to_string(r.swaps.denominator) +
         " spurious M_L2_Q4-Q6 predictions (" + format_percent(r.swaps.count, r.swaps.denominator) + ").\n\n";
  out += "## Binding drift\n\n";
  out += std::to_string(r.drift.count) + " of " + std::to_string(r.drift.denominator) +
         " spurious per-paper M_L2_Q5-Q6 predictions (" + format_percent(r.drift.count, r.drift.denominator) +
         ").\n\n";
  out += "## Recall by instance density (per-paper M_L2_Q6)\n\n";
  out += "| Gold tuples | Papers | Mean recall |\n|---|---|---|\n";
  for (const auto& b : r.density.buckets) {
    out += "| " + b.label + " | " + std::to_string(b.papers) + " | " +
           (b.mean_recall ? format_2dp(*b.mean_recall) : std::string("-")) + " |\n";
  }
  for (const auto& n : r.density.notes) out += "\n" + n + ".";
  if (!r.density.notes.empty()) out += "\n";
  out += "\n## Derived-query amplification\n\n";
  out += "| Derived | Upstream | Cells | Success | Upstream F1 |\n|---|---|---|---|---|\n";
  for (const auto& a : r.amplification) {
    out += "| " + a.derived_query + " | " + a.upstream_query + " | " + std::to_string(a.cells) +
           (a.partial ? " (partial)" : "") + " | " + format_2dp(a.success_rate) + " | " + format_2dp(a.upstream_f1) +
           " |\n";
  }
  return out;
}

}  // namespace evidx
