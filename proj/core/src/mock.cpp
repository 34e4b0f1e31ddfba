#include "evidx/mock.hpp"

#include <map>
#include <set>

#include "evidx/error.hpp"
#include "evidx/oracle.hpp"
#include "evidx/query_engine.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace {

constexpr std::string_view kQueryMarker = "\n=== QUERY ===\n";
constexpr std::string_view kFormatMarker = "\n\n=== OUTPUT FORMAT ===\n";

std::string_view query_text(std::string_view prompt) {
  const auto q = prompt.rfind(kQueryMarker);
  if (q == std::string_view::npos) return {};
  const auto start = q + kQueryMarker.size();
  const auto end = prompt.find(kFormatMarker, start);
  return prompt.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
}

std::string line_value(std::string_view prompt, std::string_view label) {
  const auto at = prompt.find(label);
  if (at == std::string_view::npos) return {};
  const auto start = at + label.size();
  const auto end = prompt.find('\n', start);
  return std::string(prompt.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

std::string scalar_line(const std::optional<Rational>& value) {
  nlohmann::json j;
  if (value) j["value"] = nlohmann::json::parse(scalar_display(*value));
  else j["value"] = nullptr;
  return j.dump() + "\n";
}

std::string scalar_answer(const QuerySpec& query, const std::vector<GoldRecord>& gold) {
  return scalar_line(oracle_answer(query, gold).scalar.value);
}

std::vector<StudyTuple> echo_tuples(const QuerySpec& query, const std::vector<const GoldRecord*>& records) {
  std::vector<StudyTuple> out;
  std::vector<GoldRecord> gold;
  for (const auto* r : records) gold.push_back(*r);
  switch (query.scoring()) {
    case ScoringKind::kTupleList:
      for (const auto* r : records) {
        auto t = project_gold(*r, query);
        out.insert(out.end(), t.begin(), t.end());
      }
      break;
    case ScoringKind::kPerDocumentCount: {
      for (const auto& [doc, count] : oracle_answer(query, gold).per_doc) {
        out.push_back({doc, query.id, {{Slot::kCount, Decimal::from_int(count)}}});
      }
      break;
    }
    case ScoringKind::kTupleSet:
      out = oracle_answer(query, gold).tuples;
      break;
    case ScoringKind::kCorpusScalar:
      // Per-paper variant asks for the document's N.
      for (const auto* r : records) {
        auto t = project_gold(*r, query_by_id("O_L1_Q2"));
        out.insert(out.end(), t.begin(), t.end());
      }
      break;
  }
  return out;
}

struct Target {
  std::size_t corpus = 0;
  std::optional<DocId> doc;  // nullopt: whole corpus
};

class GoldEcho {
 public:
  GoldEcho(std::vector<std::shared_ptr<const Corpus>> corpora, EchoOptions options)
      : corpora_(std::move(corpora)), options_(std::move(options)) {
    for (std::size_t c = 0; c < corpora_.size(); ++c) {
      const Corpus& corpus = *corpora_[c];
      targets_.emplace(build_global_input(corpus), Target{c, std::nullopt});
      for (const auto& d : corpus.documents) targets_.emplace(render_document_block(d), Target{c, d.doc_id});
    }
    for (const auto& q : registry()) {
      global_.emplace(q.text, &q);
      per_doc_.emplace(rewrite_per_document(q).text, &q);
    }
  }

  std::string operator()(const CompletionRequest& request) const {
    std::string_view prompt = request.prompt;
    if (prompt.starts_with(kJudgePromptMarker)) return judge(prompt);
    if (prompt.find(kAggregationMarker) != std::string_view::npos) return aggregation_echo(prompt);
    return extraction(prompt);
  }

 private:
  std::string judge(std::string_view prompt) const {
    if (!options_.judge) return "no";
    const std::string a = line_value(prompt, "\nValue A: ");
    const std::string b = line_value(prompt, "\nValue B: ");
    const std::string slot = line_value(prompt, "\nField: ");
    return options_.judge(a, b, slot) ? "yes" : "no";
  }

  std::string extraction(std::string_view prompt) const {
    std::size_t start = std::string_view::npos;
    for (std::size_t at = prompt.find("\n=== DOCUMENT ["); at != std::string_view::npos;
         at = prompt.find("\n=== DOCUMENT [", at + 1)) {
      const std::size_t digit = at + 15;
      if (digit < prompt.size() && std::isdigit(static_cast<unsigned char>(prompt[digit]))) {
        start = at + 1;
        break;
      }
    }
    const auto end = prompt.rfind(kQueryMarker);
    if (start == std::string_view::npos || end == std::string_view::npos || end < start) {
      throw BackendError("mock backend: prompt has no document section");
    }
    auto target = targets_.find(std::string(prompt.substr(start, end - start)));
    if (target == targets_.end()) throw BackendError("mock backend: documents do not match any loaded corpus");
    const Target& t = target->second;
    const Corpus& corpus = *corpora_[t.corpus];

    const std::string text(query_text(prompt));
    const auto& table = t.doc ? per_doc_ : global_;
    auto q = table.find(text);
    if (q == table.end()) throw BackendError("mock backend: unrecognized query text '" + text + "'");
    const QuerySpec& query = *q->second;

    std::vector<const GoldRecord*> records;
    if (t.doc) records.push_back(&corpus.gold_record(*t.doc));
    else for (const auto& r : corpus.gold) records.push_back(&r);

    if (!t.doc && query.scoring() == ScoringKind::kCorpusScalar) {
      return scalar_answer(query, corpus.gold);
    }
    std::vector<StudyTuple> tuples = echo_tuples(query, records);
    if (options_.transform) tuples = options_.transform(query, t.doc, std::move(tuples));
    return serialize_tuples(tuples);
  }

  std::vector<std::shared_ptr<const Corpus>> corpora_;
  EchoOptions options_;
  std::map<std::string, Target> targets_;
  std::map<std::string, const QuerySpec*> global_;
  std::map<std::string, const QuerySpec*> per_doc_;
};

}  // namespace

EquivalenceRule synonym_rule(std::vector<std::pair<std::string, std::string>> synonyms) {
  auto table = std::make_shared<std::set<std::pair<std::string, std::string>>>();
  for (const auto& [a, b] : synonyms) {
    table->emplace(normalize(a), normalize(b));
    table->emplace(normalize(b), normalize(a));
  }
  return [table](std::string_view a, std::string_view b, std::string_view) {
    return table->contains({normalize(a), normalize(b)});
  };
}

std::string aggregation_echo(std::string_view prompt) {
  const std::string text(query_text(prompt));
  const QuerySpec* query = nullptr;
  for (const auto& q : registry()) {
    if (q.scoring() == ScoringKind::kCorpusScalar && q.text == text) query = &q;
  }
  if (!query) throw BackendError("mock backend: aggregation prompt names no corpus-level query");

  static const std::string kOpen = "\n=== OUTPUT [";
  std::vector<GoldRecord> records;
  const auto end = prompt.rfind(kQueryMarker);
  std::size_t at = prompt.find(kOpen);
  while (at != std::string_view::npos && at < end) {
    const std::size_t id_start = at + kOpen.size();
    const std::size_t id_end = prompt.find(']', id_start);
    const std::size_t body_start = prompt.find('\n', id_end) + 1;
    std::size_t next = prompt.find(kOpen, body_start);
    const std::size_t body_end = next == std::string_view::npos || next > end ? end : next;
    GoldRecord r;
    r.doc_id = std::stoll(std::string(prompt.substr(id_start, id_end - id_start)));
    ParseResult parsed = parse_response(prompt.substr(body_start, body_end - body_start), query_by_id("O_L1_Q2"),
                                        Regime::kPerPaper, r.doc_id, {});
    for (const auto& t : parsed.tuples) {
      if (const auto* d = std::get_if<Decimal>(t.get(Slot::kN))) r.sample_sizes.push_back(*d);
    }
    records.push_back(std::move(r));
    at = next == std::string_view::npos || next > end ? std::string_view::npos : next;
  }
  return scalar_answer(*query, records);
}

MockResponder make_gold_echo_responder(std::vector<std::shared_ptr<const Corpus>> corpora, EchoOptions options) {
  auto echo = std::make_shared<GoldEcho>(std::move(corpora), std::move(options));
  return [echo](const CompletionRequest& request) { return (*echo)(request); };
}

}  // namespace evidx
