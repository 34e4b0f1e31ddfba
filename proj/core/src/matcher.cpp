#include "evidx/matcher.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "evidx/error.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace {

struct Block {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;
};

Block longest_match(std::u32string_view a, std::u32string_view b, std::size_t alo, std::size_t ahi, std::size_t blo,
                    std::size_t bhi) {
  Block best{alo, blo, 0};
  std::vector<std::size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t col = j - blo + 1;
      cur[col] = a[i] == b[j] ? prev[col - 1] + 1 : 0;
      if (cur[col] > best.size) best = {i + 1 - cur[col], j + 1 - cur[col], cur[col]};
    }
    std::swap(prev, cur);
    std::fill(cur.begin(), cur.end(), 0);
  }
  return best;
}

std::size_t matched_characters(std::u32string_view a, std::u32string_view b) {
  std::size_t total = 0;
  struct Range {
    std::size_t alo, ahi, blo, bhi;
  };
  std::vector<Range> stack{{0, a.size(), 0, b.size()}};
  while (!stack.empty()) {
    Range r = stack.back();
    stack.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    Block m = longest_match(a, b, r.alo, r.ahi, r.blo, r.bhi);
    if (m.size == 0) continue;
    total += m.size;
    stack.push_back({r.alo, m.a, r.blo, m.b});
    stack.push_back({m.a + m.size, r.ahi, m.b + m.size, r.bhi});
  }
  return total;
}

std::optional<Decimal> as_number(const SlotValue& v) {
  if (const auto* d = std::get_if<Decimal>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return Decimal::parse_lenient(*s);
  return std::nullopt;
}

// Tuple with every text slot pre-normalized.
struct Prepared {
  const StudyTuple* tuple;
  std::vector<std::u32string> text;
};

Prepared prepare(const StudyTuple& t) {
  Prepared p{&t, {}};
  for (const Field& f : t.fields) {
    p.text.push_back(is_null(f.value) ? std::u32string() : utf8_to_u32(normalize(value_to_string(f.value))));
  }
  return p;
}

double slot_score(const Field& pf, const std::u32string& pn, const Field& gf, const std::u32string& gn) {
  const bool pnull = is_null(pf.value);
  const bool gnull = is_null(gf.value);
  if (pnull || gnull) return pnull && gnull ? 1.0 : 0.0;
  if (slot_kind(gf.slot) == SlotKind::kNumeric) {
    auto a = as_number(pf.value);
    auto b = as_number(gf.value);
    return a && b && *a == *b ? 1.0 : 0.0;
  }
  return similarity(std::u32string_view(pn), std::u32string_view(gn));
}

}  // namespace

double similarity(std::u32string_view a, std::u32string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  return 2.0 * static_cast<double>(matched_characters(a, b)) / static_cast<double>(a.size() + b.size());
}

double similarity(std::string_view a, std::string_view b) { return similarity(utf8_to_u32(a), utf8_to_u32(b)); }

std::string_view outcome_name(SlotOutcome outcome) {
  switch (outcome) {
    case SlotOutcome::kExactSim: return "exact-sim";
    case SlotOutcome::kJudgeYes: return "judge-yes";
    case SlotOutcome::kNumericExact: return "numeric-exact";
    case SlotOutcome::kNullNull: return "null-null";
    case SlotOutcome::kFail: return "fail";
  }
  return "fail";
}

std::optional<SlotOutcome> outcome_from_name(std::string_view name) {
  for (SlotOutcome o : {SlotOutcome::kExactSim, SlotOutcome::kJudgeYes, SlotOutcome::kNumericExact,
                        SlotOutcome::kNullNull, SlotOutcome::kFail}) {
    if (outcome_name(o) == name) return o;
  }
  return std::nullopt;
}

SlotMatch slot_match(const SlotValue& predicted, const SlotValue& gold, SlotKind kind, Judge* judge,
                     const JudgeContext& context) {
  SlotMatch m;
  const bool pnull = is_null(predicted);
  const bool gnull = is_null(gold);
  if (pnull || gnull) {
    m.outcome = pnull && gnull ? SlotOutcome::kNullNull : SlotOutcome::kFail;
    m.similarity = pnull && gnull ? 1.0 : 0.0;
    return m;
  }
  if (kind == SlotKind::kNumeric) {
    auto a = as_number(predicted);
    auto b = as_number(gold);
    const bool equal = a && b && *a == *b;
    m.outcome = equal ? SlotOutcome::kNumericExact : SlotOutcome::kFail;
    m.similarity = equal ? 1.0 : 0.0;
    return m;
  }
  const std::string ptext = value_to_string(predicted);
  const std::string gtext = value_to_string(gold);
  m.similarity = similarity(normalize(ptext), normalize(gtext));
  if (m.similarity >= kSimilarityThreshold) {
    m.outcome = SlotOutcome::kExactSim;
    return m;
  }
  if (!judge) return m;
  JudgeVerdict verdict = judge->judge(ptext, gtext, context);
  m.judge_key = verdict.key;
  m.warning = verdict.warning;
  m.outcome = verdict.equivalent ? SlotOutcome::kJudgeYes : SlotOutcome::kFail;
  return m;
}

bool values_agree(const SlotValue& predicted, const SlotValue& gold, SlotKind kind) {
  return passes(slot_match(predicted, gold, kind, nullptr, {}).outcome);
}

MatchReport match_tuples(const std::vector<StudyTuple>& predictions, const std::vector<StudyTuple>& gold,
                         Judge* judge, std::string regime) {
  MatchReport report;
  report.regime = std::move(regime);
  report.predicted = predictions.size();
  report.gold = gold.size();
  if (!predictions.empty()) report.query_id = predictions.front().query_id;
  else if (!gold.empty()) report.query_id = gold.front().query_id;

  std::vector<Prepared> preds, golds;
  for (const auto& t : predictions) preds.push_back(prepare(t));
  for (const auto& t : gold) golds.push_back(prepare(t));

  std::multimap<DocId, std::size_t> gold_by_doc;
  for (std::size_t g = 0; g < gold.size(); ++g) gold_by_doc.emplace(gold[g].doc_id, g);

  struct Candidate {
    double score;
    std::size_t pred;
    std::size_t gold;
  };
  std::vector<Candidate> candidates;
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    auto [lo, hi] = gold_by_doc.equal_range(predictions[p].doc_id);
    for (auto it = lo; it != hi; ++it) {
      const std::size_t g = it->second;
      const StudyTuple& pt = predictions[p];
      const StudyTuple& gt = gold[g];
      if (pt.fields.size() != gt.fields.size()) continue;
      double sum = 0.0;
      for (std::size_t s = 0; s < gt.fields.size(); ++s) {
        sum += slot_score(pt.fields[s], preds[p].text[s], gt.fields[s], golds[g].text[s]);
      }
      candidates.push_back({gt.fields.empty() ? 1.0 : sum / static_cast<double>(gt.fields.size()), p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.pred != y.pred) return x.pred < y.pred;
    return x.gold < y.gold;
  });

  report.decisions.resize(predictions.size());
  for (std::size_t p = 0; p < predictions.size(); ++p) report.decisions[p].pred_index = p;
  std::vector<bool> gold_taken(gold.size(), false);
  std::set<std::string> judge_keys;

  for (const Candidate& c : candidates) {
    if (report.decisions[c.pred].correct || gold_taken[c.gold]) continue;
    const StudyTuple& pt = predictions[c.pred];
    const StudyTuple& gt = gold[c.gold];

    // Settle judge-free slots first so a pair that fails on them costs no
    // judge calls.
    std::vector<std::optional<SlotOutcome>> outcomes(gt.fields.size());
    bool ok = true;
    std::vector<std::size_t> borderline;
    for (std::size_t s = 0; s < gt.fields.size() && ok; ++s) {
      const SlotKind kind = slot_kind(gt.fields[s].slot);
      SlotMatch m = slot_match(pt.fields[s].value, gt.fields[s].value, kind, nullptr, {});
      if (passes(m.outcome)) outcomes[s] = m.outcome;
      else if (kind == SlotKind::kText && !is_null(pt.fields[s].value) && !is_null(gt.fields[s].value)) borderline.push_back(s);
      else ok = false;
    }
    if (ok && !borderline.empty()) {
      if (!judge) {
        ok = false;
      } else {
        for (std::size_t s : borderline) {
          JudgeContext ctx{gt.query_id, std::string(slot_name(gt.fields[s].slot))};
          SlotMatch m = slot_match(pt.fields[s].value, gt.fields[s].value, SlotKind::kText, judge, ctx);
          ++report.judge_calls;
          if (m.judge_key) judge_keys.insert(*m.judge_key);
          if (m.warning) report.warnings.push_back(*m.warning);
          if (!passes(m.outcome)) {
            ok = false;
            break;
          }
          outcomes[s] = m.outcome;
        }
      }
    }
    if (!ok) continue;

    MatchDecision& d = report.decisions[c.pred];
    d.gold_index = c.gold;
    d.score = c.score;
    d.correct = true;
    for (const auto& o : outcomes) d.outcomes.push_back(*o);
    gold_taken[c.gold] = true;
    ++report.correct;
  }

  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (!gold_taken[g]) report.unmatched_gold.push_back(g);
  }
  report.judge_keys.assign(judge_keys.begin(), judge_keys.end());
  return report;
}

nlohmann::json to_json(const MatchReport& report) {
  nlohmann::json j;
  j["query_id"] = report.query_id;
  j["regime"] = report.regime;
  j["counts"] = {{"correct", report.correct}, {"predicted", report.predicted}, {"gold", report.gold}};
  j["judge_calls"] = report.judge_calls;
  j["judge_keys"] = report.judge_keys;
  j["warnings"] = report.warnings;
  j["unmatched_gold"] = report.unmatched_gold;
  j["decisions"] = nlohmann::json::array();
  for (const auto& d : report.decisions) {
    nlohmann::json dj;
    dj["pred_index"] = d.pred_index;
    dj["gold_index"] = d.gold_index ? nlohmann::json(*d.gold_index) : nlohmann::json(nullptr);
    dj["outcomes"] = nlohmann::json::array();
    for (auto o : d.outcomes) dj["outcomes"].push_back(outcome_name(o));
    dj["score"] = d.score;
    dj["verdict"] = d.correct ? "correct" : "spurious";
    j["decisions"].push_back(std::move(dj));
  }
  return j;
}

MatchReport match_report_from_json(const nlohmann::json& j) {
  MatchReport r;
  try {
    r.query_id = j.at("query_id").get<std::string>();
    r.regime = j.value("regime", "");
    r.correct = j.at("counts").at("correct").get<std::size_t>();
    r.predicted = j.at("counts").at("predicted").get<std::size_t>();
    r.gold = j.at("counts").at("gold").get<std::size_t>();
    r.judge_calls = j.value("judge_calls", std::size_t{0});
    r.judge_keys = j.value("judge_keys", std::vector<std::string>{});
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.unmatched_gold = j.at("unmatched_gold").get<std::vector<std::size_t>>();
    for (const auto& dj : j.at("decisions")) {
      MatchDecision d;
      d.pred_index = dj.at("pred_index").get<std::size_t>();
      if (!dj.at("gold_index").is_null()) d.gold_index = dj.at("gold_index").get<std::size_t>();
      for (const auto& o : dj.at("outcomes")) {
        auto outcome = outcome_from_name(o.get<std::string>());
        if (!outcome) throw InputError("unknown slot outcome " + o.dump());
        d.outcomes.push_back(*outcome);
      }
      d.score = dj.value("score", 0.0);
      d.correct = dj.at("verdict").get<std::string>() == "correct";
      r.decisions.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed match report: ") + e.what());
  }
  return r;
}

}  // namespace evidx
