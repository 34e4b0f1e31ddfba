#include "evidx/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "evidx/error.hpp"
#include "evidx/gold_json.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace fs = std::filesystem;

const Document& Corpus::document(DocId id) const {
  auto it = std::lower_bound(documents.begin(), documents.end(), id,
                             [](const Document& d, DocId v) { return d.doc_id < v; });
  if (it == documents.end() || it->doc_id != id) {
    throw InputError("document " + std::to_string(id) + " is not in corpus '" + domain + "'");
  }
  return *it;
}

const GoldRecord& Corpus::gold_record(DocId id) const {
  auto it = std::find_if(gold.begin(), gold.end(), [&](const GoldRecord& r) { return r.doc_id == id; });
  if (it == gold.end()) throw InputError("no gold record for document " + std::to_string(id));
  return *it;
}

std::vector<DocId> Corpus::doc_ids() const {
  std::vector<DocId> ids;
  ids.reserve(documents.size());
  for (const auto& d : documents) ids.push_back(d.doc_id);
  return ids;
}

Corpus load_corpus(const fs::path& docs_dir, const fs::path& gold_file) {
  GoldFile gold = load_gold_file(gold_file);

  std::set<DocId> gold_ids;
  for (const auto& r : gold.documents) {
    if (!gold_ids.insert(r.doc_id).second) {
      throw InputError("gold file " + gold_file.string() + " has duplicate doc_id " + std::to_string(r.doc_id));
    }
  }

  if (!fs::is_directory(docs_dir)) throw InputError("corpus directory not found: " + docs_dir.string());
  static const std::regex name_re(R"(([0-9]+)\.md)");
  std::map<DocId, fs::path> files;
  for (const auto& entry : fs::directory_iterator(docs_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, name_re)) continue;
    files.emplace(std::stoll(m[1].str()), entry.path());
  }

  std::vector<std::string> problems;
  for (DocId id : gold_ids) {
    if (!files.contains(id)) problems.push_back("missing markdown for gold document " + std::to_string(id));
  }
  for (const auto& [id, path] : files) {
    if (!gold_ids.contains(id)) problems.push_back("orphan markdown " + path.filename().string() + " has no gold record");
  }
  if (!problems.empty()) {
    std::string msg = "corpus " + docs_dir.string() + ":";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }

  Corpus corpus;
  corpus.domain = gold.domain.empty() ? docs_dir.parent_path().filename().string() : gold.domain;
  for (const auto& [id, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Document doc{id, buf.str(), 0};
    if (doc.markdown.empty()) throw InputError("document " + path.string() + " is empty");
    doc.token_estimate = utf8_length(doc.markdown) / 4;
    corpus.documents.push_back(std::move(doc));
  }
  corpus.gold = std::move(gold.documents);
  std::sort(corpus.gold.begin(), corpus.gold.end(),
            [](const GoldRecord& a, const GoldRecord& b) { return a.doc_id < b.doc_id; });
  return corpus;
}

Corpus load_domain(const fs::path& domain_dir) {
  return load_corpus(domain_dir / "docs", domain_dir / "gold.json");
}

std::string document_header(DocId doc_id) { return "=== DOCUMENT [" + std::to_string(doc_id) + "] ==="; }

std::string render_document_block(const Document& doc) {
  std::string out = document_header(doc.doc_id);
  out += '\n';
  out += doc.markdown;
  if (out.back() != '\n') out += '\n';
  return out;
}

std::string build_global_input(const Corpus& corpus) {
  if (corpus.documents.empty()) throw InputError("cannot build global input for an empty corpus");
  std::vector<const Document*> ordered;
  for (const auto& d : corpus.documents) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(), [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });
  std::string out;
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    if (k > 0) out += '\n';
    out += render_document_block(*ordered[k]);
  }
  return out;
}

StatsRow summarize(std::string metric, std::vector<Decimal> values) {
  StatsRow row;
  row.metric = std::move(metric);
  row.documents = values.size();
  if (values.empty()) return row;
  std::sort(values.begin(), values.end());
  row.min = values.front();
  row.max = values.back();
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    row.median = values[n / 2];
  } else {
    const Rational sum = Rational::from_decimal(values[n / 2 - 1] + values[n / 2]);
    row.median = Rational(sum.numerator(), sum.denominator() * 2).to_decimal();
  }
  for (const auto& v : values) row.total = row.total + v;
  return row;
}

StatsTable descriptive_stats(const std::vector<GoldRecord>& gold, std::string domain) {
  StatsTable table;
  table.domain = std::move(domain);
  table.papers = gold.size();
  std::vector<Decimal> sample, methods, variables, effects;
  std::size_t without_n = 0;
  for (const auto& r : gold) {
    if (auto total = r.sample_size_total()) sample.push_back(*total);
    else ++without_n;
    std::vector<std::string> method_names, variable_names;
    for (const auto& a : r.associations) method_names.push_back(a.method);
    for (const auto& v : r.variables) variable_names.push_back(v.name);
    methods.push_back(Decimal::from_int(static_cast<std::int64_t>(distinct_names(method_names).size())));
    variables.push_back(Decimal::from_int(static_cast<std::int64_t>(distinct_names(variable_names).size())));
    effects.push_back(Decimal::from_int(static_cast<std::int64_t>(r.associations.size())));
  }
  table.rows.push_back(summarize("sample_size", std::move(sample)));
  table.rows.push_back(summarize("statistical_methods", std::move(methods)));
  table.rows.push_back(summarize("variables", std::move(variables)));
  table.rows.push_back(summarize("effect_sizes", std::move(effects)));
  table.notes.push_back("sample_size: per-document sum of reported sample sizes");
  table.notes.push_back("statistical_methods: distinct normalized method names per document");
  table.notes.push_back("variables: distinct normalized variable names per document (roles merged)");
  table.notes.push_back("effect_sizes: association entries per document");
  if (without_n > 0) {
    table.notes.push_back("sample_size: " + std::to_string(without_n) + " document(s) without a reported N excluded");
  }
  return table;
}

std::string stats_to_csv(const StatsTable& table) {
  std::ostringstream out;
  out << "metric,min,median,max,total\n";
  for (const auto& row : table.rows) {
    out << row.metric << ',' << row.min.to_string() << ',' << row.median.to_string() << ','
        << row.max.to_string() << ',' << row.total.to_string() << '\n';
  }
  return out.str();
}

nlohmann::json stats_to_json(const StatsTable& table) {
  nlohmann::json out;
  out["domain"] = table.domain;
  out["papers"] = table.papers;
  out["notes"] = table.notes;
  out["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    out["rows"].push_back({{"metric", row.metric},
                           {"documents", row.documents},
                           {"min", nlohmann::json::parse(row.min.to_string())},
                           {"median", nlohmann::json::parse(row.median.to_string())},
                           {"max", nlohmann::json::parse(row.max.to_string())},
                           {"total", nlohmann::json::parse(row.total.to_string())}});
  }
  return out;
}

}  // namespace evidx
