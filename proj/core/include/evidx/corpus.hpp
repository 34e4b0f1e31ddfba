#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/decimal.hpp"
#include "evidx/schema.hpp"

namespace evidx {

struct Document {
  DocId doc_id = 0;
  std::string markdown;
  std::size_t token_estimate = 0;  // code points / 4
};

/// Documents and gold for one domain; documents sorted by doc_id and in
/// bijection with the gold records.
struct Corpus {
  std::string domain;
  std::vector<Document> documents;
  std::vector<GoldRecord> gold;

  const Document& document(DocId id) const;  // throws InputError
  const GoldRecord& gold_record(DocId id) const;
  std::vector<DocId> doc_ids() const;
};

/// Loads `<doc_id>.md` files from `docs_dir` and the gold file. Fails
/// atomically (InputError) on missing markdown, orphan markdown, duplicate
/// gold ids, or empty markdown.
Corpus load_corpus(const std::filesystem::path& docs_dir, const std::filesystem::path& gold_file);

/// Convenience for the `<domain>/docs/*.md` + `<domain>/gold.json` layout.
Corpus load_domain(const std::filesystem::path& domain_dir);

/// Exact header line preceding each document in prompts (no newline).
std::string document_header(DocId doc_id);

/// Header + markdown for one document; always ends with a newline.
std::string render_document_block(const Document& doc);

/// All documents in doc_id order, blocks separated by a blank line.
std::string build_global_input(const Corpus& corpus);

struct StatsRow {
  std::string metric;
  std::size_t documents = 0;  // documents contributing a value
  Decimal min;
  Decimal median;
  Decimal max;
  Decimal total;
};

struct StatsTable {
  std::string domain;
  std::size_t papers = 0;
  std::vector<StatsRow> rows;  // sample_size, statistical_methods, variables, effect_sizes
  std::vector<std::string> notes;
};

/// Min/median/max/total over per-document values; even-count medians are the
/// midpoint of the two middle values.
StatsRow summarize(std::string metric, std::vector<Decimal> per_document);

StatsTable descriptive_stats(const std::vector<GoldRecord>& gold, std::string domain = {});

std::string stats_to_csv(const StatsTable& table);
nlohmann::json stats_to_json(const StatsTable& table);

}  // namespace evidx
