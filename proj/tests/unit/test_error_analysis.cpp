#include <gtest/gtest.h>

#include "evidx/error_analysis.hpp"
#include "support.hpp"

using namespace evidx;
using namespace evidx::testing;

TEST(FormatPercent, HalfUpInIntegers) {
  EXPECT_EQ(format_percent(688, 4430), "15.5%");
  EXPECT_EQ(format_percent(518, 2403), "21.6%");
  EXPECT_EQ(format_percent(3, 10), "30.0%");
  EXPECT_EQ(format_percent(1, 8), "12.5%");
  EXPECT_EQ(format_percent(1, 16), "6.3%");  // 6.25 rounds up
  EXPECT_EQ(format_percent(1, 3), "33.3%");
  EXPECT_EQ(format_percent(2, 3), "66.7%");
  EXPECT_EQ(format_percent(5, 5), "100.0%");
  EXPECT_EQ(format_percent(0, 0), "n/a");
}

TEST(Taxonomy, PlantedSwapsAndDrift) {
  const auto cells = planted_taxonomy_cells();
  ASSERT_EQ(cells.front().score.correct, 3u);
  const Classification swaps = detect_role_swaps(cells);
  const Classification drift = detect_binding_drift(cells);
  EXPECT_EQ(swaps.count, 3u);
  EXPECT_EQ(swaps.denominator, 10u);
  EXPECT_EQ(drift.count, 2u);
  EXPECT_EQ(drift.denominator, 10u);
  EXPECT_DOUBLE_EQ(swaps.ratio(), 0.3);
  // The prediction that is both a swap and a drift candidate counts as a swap.
  std::set<std::size_t> swap_preds, drift_preds;
  for (const auto& i : swaps.instances) swap_preds.insert(i.pred_index);
  for (const auto& i : drift.instances) drift_preds.insert(i.pred_index);
  EXPECT_EQ(swap_preds, (std::set<std::size_t>{3, 4, 5}));
  EXPECT_EQ(drift_preds, (std::set<std::size_t>{6, 7}));
}

TEST(Taxonomy, DriftIgnoresGlobalCellsButSwapsDoNot) {
  auto cells = planted_taxonomy_cells();
  cells.front().cell.regime = "global";
  cells.front().score.regime = "global";
  EXPECT_EQ(detect_role_swaps(cells).count, 3u);
  EXPECT_EQ(detect_binding_drift(cells).denominator, 0u);
}

TEST(Taxonomy, SwapConsumesGold) {
  const std::string q = "M_L2_Q4";
  auto t = [&](const char* iv, const char* dv) { return tuple_of(1, q, {text(Slot::kIV, iv), text(Slot::kDV, dv)}); };
  ScoredQuery sq;
  sq.cell = {"d", "m", "per-paper"};
  sq.score = score_tuple_list(query_by_id(q), "per-paper", {t("b", "a"), t("b", "a")}, {t("a", "b")}, nullptr);
  const auto swaps = detect_role_swaps({sq});
  EXPECT_EQ(swaps.count, 1u);
  EXPECT_EQ(swaps.denominator, 2u);
}

TEST(Taxonomy, Q6ComparesOnlyThePair) {
  const std::string q = "M_L2_Q6";
  auto t = [&](const char* iv, const char* dv, const char* e) {
    return tuple_of(1, q, {text(Slot::kIV, iv), text(Slot::kDV, dv), text(Slot::kA, "ols"), null_field(Slot::kC),
                             number(Slot::kE, e)});
  };
  ScoredQuery sq;
  sq.cell = {"d", "m", "global"};
  sq.score = score_tuple_list(query_by_id(q), "global", {t("b", "a", "0.9")}, {t("a", "b", "0.1")}, nullptr);
  EXPECT_EQ(detect_role_swaps({sq}).count, 1u);
}

TEST(Density, BucketsByGoldCount) {
  const std::string q = "M_L2_Q6";
  auto t = [&](DocId d, const std::string& iv) {
    return tuple_of(d, q, {text(Slot::kIV, iv), text(Slot::kDV, "y"), text(Slot::kA, "ols"), null_field(Slot::kC),
                             number(Slot::kE, "0.5")});
  };
  std::vector<StudyTuple> gold, pred;
  for (int k = 0; k < 4; ++k) gold.push_back(t(1, "v" + std::to_string(k)));
  for (int k = 0; k < 8; ++k) gold.push_back(t(2, "w" + std::to_string(k)));
  pred = {gold[0], gold[1], gold[4]};
  const QueryScore s = score_tuple_list(query_by_id(q), "per-paper", pred, gold, nullptr);
  const DensityReport r = recall_by_density({{&s, {1, 2, 3}}});
  ASSERT_EQ(r.buckets.size(), 3u);
  EXPECT_EQ(r.buckets[0].label, "0");
  EXPECT_FALSE(r.buckets[0].mean_recall);
  EXPECT_EQ(r.buckets[1].label, "1-5");
  EXPECT_DOUBLE_EQ(*r.buckets[1].mean_recall, 0.5);
  EXPECT_EQ(r.buckets[2].label, "6-10");
  EXPECT_DOUBLE_EQ(*r.buckets[2].mean_recall, 0.125);
}

TEST(Amplification, PairsDerivedWithUpstream) {
  EXPECT_EQ(amplification_upstream().at("O_C_Q2"), "O_L1_Q2");
  EXPECT_EQ(amplification_upstream().at("M_C_Q5"), "M_L2_Q6");
  EXPECT_EQ(amplification_upstream().size(), 8u);

  ScoredQuery derived, upstream;
  derived.cell = upstream.cell = {"d", "m", "per-paper"};
  derived.score.query_id = "O_C_Q2";
  derived.score.success = 0.0;
  upstream.score.query_id = "O_L1_Q2";
  upstream.score.prf = {1.0, 0.9, 0.947};
  const auto rows = amplification_report({derived, upstream});
  // O_C_Q1 and O_C_Q3 share the upstream query but have no score here.
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].derived_query, "O_C_Q2");
  EXPECT_EQ(rows[1].cells, 1u);
  EXPECT_DOUBLE_EQ(rows[1].success_rate, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].upstream_f1, 0.947);
  EXPECT_FALSE(rows[1].partial);
  EXPECT_TRUE(rows[0].partial);
  EXPECT_EQ(rows[0].cells, 0u);
}

TEST(Taxonomy, ReportRendering) {
  TaxonomyReport r;
  r.swaps = detect_role_swaps(planted_taxonomy_cells());
  r.drift = detect_binding_drift(planted_taxonomy_cells());
  const auto j = to_json(r);
  EXPECT_EQ(j["role_swaps"]["display"], "30.0%");
  EXPECT_EQ(j["binding_drift"]["display"], "20.0%");
  const std::string md = taxonomy_markdown(r);
  EXPECT_NE(md.find("3 of 10"), std::string::npos);
  EXPECT_NE(md.find("(20.0%)"), std::string::npos);
}
