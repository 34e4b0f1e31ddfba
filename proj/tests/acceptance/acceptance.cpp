// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evidx/corpus.hpp"
#include "evidx/error_analysis.hpp"
#include "evidx/matcher.hpp"
#include "evidx/metrics.hpp"
#include "evidx/oracle.hpp"
#include "evidx/pipeline.hpp"
#include "support.hpp"

using namespace evidx;
using namespace evidx::testing;

namespace {

// Pinned tolerances.
constexpr double kPrfTolerance = 1e-12;
constexpr double kIdentityBudgetSeconds = 60.0;
constexpr int kPrfTriples = 10000;
constexpr int kMatchingInstances = 200;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::filesystem::path> all_domain_dirs() {
  std::vector<std::filesystem::path> dirs;
  for (const auto& d : fixture_domains()) dirs.push_back(fixture_path(d));
  return dirs;
}

Outcome identity_suite() {
  TempDir tmp("identity");
  RunConfig cfg;
  cfg.corpus_dirs = all_domain_dirs();
  cfg.out = tmp.path() / "out";
  const auto start = std::chrono::steady_clock::now();
  const RunSummary run = cmd_run(cfg);
  const ScoreSummary scored = cmd_score(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto corpora = load_corpora(cfg);
  const auto scores = load_scores(cfg, corpora);
  std::size_t perfect = 0;
  std::string first_bad;
  for (const auto& sq : scores) {
    const PRF& p = sq.score.prf;
    if (p.precision == 1.0 && p.recall == 1.0 && p.f1 == 1.0) ++perfect;
    else if (first_bad.empty()) first_bad = sq.cell.domain + "/" + sq.cell.regime + "/" + sq.score.query_id;
  }
  const std::size_t expected = fixture_domains().size() * registry().size() * cfg.regimes.size();
  std::ostringstream d;
  d << perfect << "/" << expected << " cells at P=R=F1=1.000 over " << fixture_domains().size() << " domains x "
    << registry().size() << " queries x " << cfg.regimes.size() << " regimes, judge calls " << scored.judge_calls
    << ", failed cells " << run.failed_cells << ", " << seconds << " s";
  if (!first_bad.empty()) d << ", first imperfect " << first_bad;
  return {perfect == expected && scores.size() == expected && scored.judge_calls == 0 && run.failed_cells == 0 &&
              seconds < kIdentityBudgetSeconds,
          d.str()};
}

Outcome metric_arithmetic() {
  const PRF p = prf(2, 4, 5);
  bool ok = std::abs(p.precision - 0.5) <= kPrfTolerance && std::abs(p.recall - 0.4) <= kPrfTolerance &&
            std::abs(p.f1 - 4.0 / 9.0) <= kPrfTolerance;
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<std::size_t> size(0, 50);
  int violations = 0;
  for (int k = 0; k < kPrfTriples; ++k) {
    const std::size_t predicted = size(rng), gold = size(rng);
    std::uniform_int_distribution<std::size_t> c(0, std::min(predicted, gold));
    const PRF r = prf(c(rng), predicted, gold);
    const double lo = std::min(r.precision, r.recall), hi = std::max(r.precision, r.recall);
    const bool in_range = r.precision >= 0 && r.precision <= 1 && r.recall >= 0 && r.recall <= 1;
    const bool bounded = r.f1 >= lo - kPrfTolerance && r.f1 <= hi + kPrfTolerance;
    const bool zero_rule = (r.precision + r.recall == 0) ? r.f1 == 0 : true;
    if (!in_range || !bounded || !zero_rule) ++violations;
  }
  std::ostringstream d;
  d.precision(15);
  d << "prf(2,4,5) = (" << p.precision << ", " << p.recall << ", " << p.f1 << "); " << violations
    << " bound violations in " << kPrfTriples << " random triples";
  return {ok && violations == 0, d.str()};
}

Outcome matching_equivalence() {
  std::mt19937_64 rng(kSeed);
  int agree = 0, nontrivial = 0;
  std::string first_bad;
  for (int k = 0; k < kMatchingInstances; ++k) {
    const MatchingInstance inst = random_matching_instance(rng);
    const std::size_t greedy = match_tuples(inst.predictions, inst.gold, nullptr).correct;
    const std::size_t best = exhaustive_max_correct(inst.predictions, inst.gold);
    if (best > 0) ++nontrivial;
    if (greedy == best) ++agree;
    else if (first_bad.empty()) first_bad = "instance " + std::to_string(k) + ": greedy " + std::to_string(greedy) +
                                            " vs exhaustive " + std::to_string(best);
  }
  std::ostringstream d;
  d << agree << "/" << kMatchingInstances << " instances agree (" << nontrivial << " with a non-empty optimum)";
  if (!first_bad.empty()) d << "; " << first_bad;
  return {agree == kMatchingInstances, d.str()};
}

Outcome paper_ratios() {
  const std::string a = format_percent(688, 4430), b = format_percent(518, 2403);
  return {a == "15.5%" && b == "21.6%", "688/4430 -> " + a + ", 518/2403 -> " + b};
}

Outcome oracle_cross_check() {
  std::size_t checked = 0, mismatched = 0;
  std::string first_bad;
  for (const auto& domain : fixture_domains()) {
    const Corpus corpus = load_domain(fixture_path(domain));
    const nlohmann::json expected = read_json(fixture_path(domain + "/expected_oracle.json"));
    auto compare = [&](const std::string& what, const nlohmann::json& got, const nlohmann::json& want) {
      ++checked;
      if (got == want) return;
      ++mismatched;
      if (first_bad.empty()) first_bad = domain + " " + what + ": " + got.dump() + " vs " + want.dump();
    };
    for (const char* q : {"O_C_Q1", "O_C_Q2", "O_C_Q3"}) {
      const auto ans = oracle_answer(query_by_id(q), corpus.gold);
      compare(q, ans.scalar.value ? nlohmann::json(ans.scalar.value->to_string()) : nlohmann::json(), expected.at(q));
    }
    for (const char* q : {"M_C_Q1", "M_C_Q2", "M_C_Q3", "M_C_Q4"}) {
      nlohmann::json got = nlohmann::json::array();
      for (const auto& [doc, n] : oracle_answer(query_by_id(q), corpus.gold).per_doc) got.push_back({doc, n});
      compare(q, got, expected.at(q));
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& t : oracle_answer(query_by_id("M_C_Q5"), corpus.gold).tuples) {
      pairs.push_back({t.doc_id, value_to_string(*t.get(Slot::kIV)), value_to_string(*t.get(Slot::kDV)),
                       value_to_string(*t.get(Slot::kE))});
    }
    compare("M_C_Q5", pairs, expected.at("M_C_Q5"));
  }

  const StatsTable medical = descriptive_stats(load_domain(fixture_path("medical")).gold, "medical");
  const StatsRow& n = medical.rows.front();
  const bool table5 = n.metric == "sample_size" && n.min.to_string() == "184" && n.median.to_string() == "5417" &&
                      n.max.to_string() == "1323052" && n.total.to_string() == "1391776";
  std::ostringstream d;
  d << checked - mismatched << "/" << checked << " derived answers equal the script output; medical N min/median/max/total "
    << n.min.to_string() << "/" << n.median.to_string() << "/" << n.max.to_string() << "/" << n.total.to_string();
  if (!first_bad.empty()) d << "; first mismatch " << first_bad;
  return {mismatched == 0 && checked > 0 && table5, d.str()};
}

Outcome amplification() {
  std::size_t flipped = 0, f1_ok = 0;
  std::ostringstream d;
  for (const auto& domain : fixture_domains()) {
    const Corpus corpus = load_domain(fixture_path(domain));
    const auto mean = oracle_mean(corpus.gold);
    // Drop the first document whose N differs from the mean, so removal must
    // move it.
    std::optional<DocId> victim;
    for (const auto& r : corpus.gold) {
      auto total = r.sample_size_total();
      if (total && mean.value && !(Rational::from_decimal(*total) == *mean.value)) {
        victim = r.doc_id;
        break;
      }
    }
    if (!victim) continue;

    TempDir tmp("amplify");
    RunConfig cfg;
    cfg.corpus_dirs = {fixture_path(domain)};
    cfg.queries = {"O_L1_Q2", "O_C_Q2"};
    cfg.regimes = {Regime::kPerPaper};
    cfg.out = tmp.path();
    cfg.echo.transform = [victim](const QuerySpec&, std::optional<DocId> doc, std::vector<StudyTuple> tuples) {
      std::vector<StudyTuple> kept;
      for (auto& t : tuples) {
        if (!(doc == victim && t.get(Slot::kN))) kept.push_back(std::move(t));
      }
      return kept;
    };
    cmd_run(cfg);
    cmd_score(cfg);
    const auto scores = load_scores(cfg, load_corpora(cfg));
    const std::size_t n = corpus.gold.size();
    for (const auto& sq : scores) {
      if (sq.score.query_id == "O_C_Q2" && sq.score.success && *sq.score.success == 0.0) ++flipped;
      if (sq.score.query_id == "O_L1_Q2" && sq.score.prf.f1 >= static_cast<double>(n - 1) / static_cast<double>(n)) {
        ++f1_ok;
        d << domain << " O_L1_Q2 F1 " << sq.score.prf.f1 << " >= " << static_cast<double>(n - 1) / n << "; ";
      }
    }
  }
  const std::size_t domains = fixture_domains().size();
  d << "O_C_Q2 flipped to false in " << flipped << "/" << domains << " domains";
  return {flipped == domains && f1_ok == domains, d.str()};
}

Outcome regime_delta_report() {
  const ReportBundle b = build_report(table6_average_scores());
  const std::string csv = regime_delta_csv(b.deltas);
  const bool qwen = csv.find("table6_average,Qwen3-VL,0.35,0.18,0.17\n") != std::string::npos;
  const bool gpt = csv.find("table6_average,GPT-5.2,0.28,0.24,0.04\n") != std::string::npos;
  std::string rows;
  for (const auto& r : b.deltas) {
    if (r.domain == "table6_average") {
      rows += r.model + " " + format_2dp(r.per_paper_f1) + "->" + format_2dp(r.global_f1) + " drop " +
              format_2dp(r.drop) + "; ";
    }
  }
  return {qwen && gpt, rows + "csv rows present: " + (qwen && gpt ? "yes" : "no")};
}

Outcome determinism() {
  TempDir tmp("determinism");
  RunConfig seed;
  seed.corpus_dirs = all_domain_dirs();
  seed.cache_dir = tmp.path() / "cache";
  seed.out = tmp.path() / "seed";
  cmd_run(seed);
  cmd_score(seed);

  std::size_t network = 0, backend = 0;
  auto replay = [&](const std::string& name) {
    RunConfig cfg = seed;
    cfg.backend = BackendKind::kReplay;
    cfg.out = tmp.path() / name;
    const RunSummary s = cmd_run(cfg);
    network += s.gateway.network_calls;
    backend += s.gateway.backend_calls;
    cmd_score(cfg);
    cmd_analyze(cfg);
    cmd_report(cfg);
    return snapshot_tree(cfg.out);
  };
  const auto first = replay("replay1");
  const auto second = replay("replay2");
  std::size_t kinds[4] = {0, 0, 0, 0};
  for (const auto& [name, body] : first) {
    if (name.ends_with(".score.json")) ++kinds[1];
    else if (name.find("taxonomy") != std::string::npos) ++kinds[2];
    else if (name.find('/') == std::string::npos) ++kinds[3];
    else ++kinds[0];
  }
  std::ostringstream d;
  d << first.size() << " files (" << kinds[0] << " prediction, " << kinds[1] << " score, " << kinds[2]
    << " taxonomy, " << kinds[3] << " report) " << (first == second ? "byte-identical" : "DIFFER")
    << "; network calls " << network << ", backend calls " << backend;
  return {first == second && !first.empty() && network == 0 && backend == 0 && kinds[0] > 0 && kinds[1] > 0 &&
              kinds[2] > 0 && kinds[3] > 0,
          d.str()};
}

Outcome swap_drift() {
  const auto cells = planted_taxonomy_cells();
  const Classification swaps = detect_role_swaps(cells);
  const Classification drift = detect_binding_drift(cells);
  const std::string s = "(" + std::to_string(swaps.count) + ", " + format_percent(swaps.count, swaps.denominator) + ")";
  const std::string r = "(" + std::to_string(drift.count) + ", " + format_percent(drift.count, drift.denominator) + ")";
  return {s == "(3, 30.0%)" && r == "(2, 20.0%)", "swaps " + s + ", drift " + r};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"identity-suite", identity_suite},
      {"metric-arithmetic", metric_arithmetic},
      {"matching-oracle-equivalence", matching_equivalence},
      {"paper-ratio-reproduction", paper_ratios},
      {"oracle-cross-checks", oracle_cross_check},
      {"amplification-property", amplification},
      {"regime-delta-report", regime_delta_report},
      {"determinism", determinism},
      {"swap-drift-detectors", swap_drift},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
