#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "evidx/matcher.hpp"

namespace {

std::string random_phrase(std::mt19937& rng, std::size_t length) {
  static const std::string alphabet = "abcdefghij klmnop";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(alphabet[pick(rng)]);
  return s;
}

void BM_Similarity(benchmark::State& state) {
  std::mt19937 rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::string a = random_phrase(rng, n);
  const std::string b = random_phrase(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(evidx::similarity(a, b));
}
BENCHMARK(BM_Similarity)->Arg(16)->Arg(64)->Arg(256);

void BM_MatchTuples(benchmark::State& state) {
  std::mt19937 rng(11);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<evidx::StudyTuple> preds, golds;
  for (std::size_t i = 0; i < n; ++i) {
    const evidx::DocId doc = static_cast<evidx::DocId>(i % 5 + 1);
    golds.push_back({doc, "M_L2_Q5", {{evidx::Slot::kIV, random_phrase(rng, 20)},
                                      {evidx::Slot::kDV, random_phrase(rng, 20)},
                                      {evidx::Slot::kA, random_phrase(rng, 12)}}});
    preds.push_back(golds.back());
    if (i % 3 == 0) preds.back().fields[1].value = random_phrase(rng, 20);
  }
  for (auto _ : state) benchmark::DoNotOptimize(evidx::match_tuples(preds, golds, nullptr));
}
BENCHMARK(BM_MatchTuples)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
