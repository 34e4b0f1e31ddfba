#include <string>

#include <benchmark/benchmark.h>

#include "evidx/query_engine.hpp"

namespace {

evidx::Corpus synthetic_corpus(std::size_t docs, std::size_t chars) {
  evidx::Corpus c;
  c.domain = "bench";
  for (std::size_t i = 1; i <= docs; ++i) {
    evidx::Document d;
    d.doc_id = static_cast<evidx::DocId>(i);
    d.markdown = std::string(chars, 'x') + "\n";
    c.documents.push_back(std::move(d));
    evidx::GoldRecord r;
    r.doc_id = d.doc_id;
    c.gold.push_back(std::move(r));
  }
  return c;
}

void BM_RenderGlobalPrompt(benchmark::State& state) {
  const auto corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 40000);
  const auto& q = evidx::query_by_id("M_L2_Q6");
  for (auto _ : state) {
    auto bundle = evidx::render_prompt(q, evidx::Regime::kGlobal, corpus, std::nullopt);
    benchmark::DoNotOptimize(evidx::request_key({"m", 0.1, bundle.prompt_text, std::nullopt}));
  }
}
BENCHMARK(BM_RenderGlobalPrompt)->Arg(1)->Arg(11);

void BM_ParseResponse(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) {
    text += R"({"doc": 3, "IV": "soil moisture", "DV": "yield", "A": "Pearson correlation", "C": null, "E": 0.71})";
    text += "\n";
  }
  const auto& q = evidx::query_by_id("M_L2_Q6");
  const std::set<evidx::DocId> ids{1, 2, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evidx::parse_response(text, q, evidx::Regime::kGlobal, std::nullopt, ids));
  }
}
BENCHMARK(BM_ParseResponse)->Arg(10)->Arg(100);

}  // namespace
