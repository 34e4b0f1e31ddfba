#include <gtest/gtest.h>

#include "evidx/error.hpp"
#include "evidx/gold_json.hpp"
#include "support.hpp"

using namespace evidx;
using namespace evidx::testing;

TEST(GoldJson, ParsesFullRecord) {
  const auto file = parse_gold_json(R"({
    "domain": "demo",
    "documents": [{
      "doc_id": 4, "doi": "10.1/abc",
      "populations": ["Adults"], "geolocations": ["Chile"], "sample_sizes": [1200, "1,500"],
      "variables": [{"name": "Age", "role": "IV", "scale": "continuous", "unit": "years"},
                    {"name": "Blood pressure", "role": "DV"}],
      "associations": [{"iv": "Age", "dv": "Blood pressure", "method": "OLS",
                        "effect": {"family": "beta", "value": 0.30}}],
      "population_links": [{"population": "Adults", "geolocation": "Chile", "sample_size": 1200}]
    }]})");
  ASSERT_EQ(file.documents.size(), 1u);
  const GoldRecord& r = file.documents[0];
  EXPECT_EQ(file.domain, "demo");
  EXPECT_EQ(r.doc_id, 4);
  EXPECT_EQ(r.sample_sizes[1].to_string(), "1500");
  EXPECT_EQ(r.sample_size_total()->to_string(), "2700");
  EXPECT_FALSE(r.variables[1].scale.has_value());
  EXPECT_EQ(r.associations[0].effect.family, EffectFamily::kBeta);
  EXPECT_EQ(r.associations[0].effect.value.to_string(), "0.3");
  EXPECT_FALSE(r.associations[0].condition.has_value());
  ASSERT_EQ(r.population_links.size(), 1u);
}

TEST(GoldJson, ErrorsNameThePath) {
  try {
    parse_gold_json(R"({"documents": [{"doc_id": 1, "variables": [{"name": "x", "role": "XV"}]}]})");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("documents[0].variables[0].role"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_gold_json("{not json"), InputError);
  EXPECT_THROW(parse_gold_json(R"({"documents": [{"doi": "x"}]})"), InputError);
  EXPECT_THROW(parse_gold_json(R"({"documents": [{"doc_id": 1.5}]})"), InputError);
  EXPECT_THROW(parse_gold_json(R"({"documents": [{"doc_id": 1, "sample_sizes": ["many"]}]})"), InputError);
}

TEST(GoldJson, EffectFamilies) {
  EXPECT_EQ(effect_family_from_label("r"), EffectFamily::kR);
  EXPECT_EQ(effect_family_from_label("R2"), EffectFamily::kR2);
  EXPECT_EQ(effect_family_from_label("OR"), EffectFamily::kOddsRatio);
  EXPECT_EQ(effect_family_from_label("Cohen's d"), EffectFamily::kOther);
}

TEST(GoldJson, FixturesRoundTrip) {
  for (const auto& domain : fixture_domains()) {
    const GoldFile file = load_gold_file(fixture_path(domain + "/gold.json"));
    const GoldFile again = parse_gold_json(to_json(file).dump());
    EXPECT_EQ(to_json(again), to_json(file)) << domain;
    EXPECT_TRUE(validate_gold_set(file.documents).valid()) << domain;
    EXPECT_EQ(validate_gold_set(file.documents).warning_count(), 0u) << domain;
  }
}

TEST(GoldJson, MissingFile) { EXPECT_THROW(load_gold_file("/nonexistent/gold.json"), InputError); }
