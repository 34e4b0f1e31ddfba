#include <algorithm>
#include <map>
#include <set>

#include "evidx/error.hpp"
#include "evidx/fs_util.hpp"
#include "evidx/pipeline.hpp"

namespace evidx {
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }
void write_json(const fs::path& path, const nlohmann::json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

const Corpus* find_corpus(const std::vector<std::shared_ptr<const Corpus>>& corpora, const std::string& domain) {
  for (const auto& c : corpora) {
    if (c->domain == domain) return c.get();
  }
  return nullptr;
}

nlohmann::json delta_json(const DeltaRow& d) {
  return {{"domain", d.domain},
          {"model", d.model},
          {"per_paper_f1", d.per_paper_f1},
          {"global_f1", d.global_f1},
          {"drop", d.drop}};
}

}  // namespace

std::vector<ScoredQuery> load_scores(const RunConfig& config,
                                     const std::vector<std::shared_ptr<const Corpus>>& corpora) {
  std::vector<ScoredQuery> out;
  for (const auto& corpus : corpora) {
    for (const auto& model : config.models) {
      for (Regime regime : config.regimes) {
        const fs::path dir = cell_dir(config.out, corpus->domain, model, regime);
        for (const QuerySpec* q : selected_queries(config)) {
          const fs::path file = dir / (q->id + ".score.json");
          if (!fs::exists(file)) continue;
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(read_file(file));
          } catch (const nlohmann::json::parse_error& e) {
            throw InputError("malformed score file " + file.string() + ": " + e.what());
          }
          out.push_back({{corpus->domain, model, std::string(regime_name(regime))}, query_score_from_json(j)});
        }
      }
    }
  }
  return out;
}

TaxonomyReport build_taxonomy(const std::vector<ScoredQuery>& scores,
                              const std::vector<std::shared_ptr<const Corpus>>& corpora) {
  TaxonomyReport r;
  r.swaps = detect_role_swaps(scores);
  r.drift = detect_binding_drift(scores);
  std::vector<std::pair<const QueryScore*, std::vector<DocId>>> density;
  for (const auto& sq : scores) {
    if (sq.score.query_id != "M_L2_Q6" || sq.score.regime != "per-paper") continue;
    const Corpus* corpus = find_corpus(corpora, sq.cell.domain);
    std::vector<DocId> docs = corpus ? corpus->doc_ids() : std::vector<DocId>{};
    density.emplace_back(&sq.score, std::move(docs));
  }
  r.density = recall_by_density(density);
  if (density.empty()) r.density.notes.push_back("no per-paper M_L2_Q6 scores available");
  r.amplification = amplification_report(scores);
  return r;
}

TaxonomyReport cmd_analyze(const RunConfig& config) {
  const auto corpora = load_corpora(config);
  const auto scores = load_scores(config, corpora);
  for (const auto& corpus : corpora) {
    std::vector<ScoredQuery> subset;
    for (const auto& sq : scores) {
      if (sq.cell.domain == corpus->domain) subset.push_back(sq);
    }
    TaxonomyReport r = build_taxonomy(subset, corpora);
    const fs::path dir = domain_dir(config.out, corpus->domain);
    write_json(dir / "taxonomy.json", to_json(r));
    write_text(dir / "taxonomy.md", "# Error analysis: " + corpus->domain + "\n\n" + taxonomy_markdown(r));
  }
  TaxonomyReport pooled = build_taxonomy(scores, corpora);
  write_json(config.out / "taxonomy.json", to_json(pooled));
  write_text(config.out / "taxonomy.md", "# Error analysis: all domains\n\n" + taxonomy_markdown(pooled));
  return pooled;
}

ReportBundle build_report(const std::vector<ScoredQuery>& scores) {
  ReportBundle b;
  std::vector<CellKey> order;
  std::map<CellKey, std::map<std::string, PRF>> by_cell;
  std::vector<std::pair<CellKey, QueryScore>> rows;
  for (const auto& sq : scores) {
    if (!by_cell.contains(sq.cell)) order.push_back(sq.cell);
    by_cell[sq.cell][sq.score.query_id] = sq.score.prf;
    rows.emplace_back(sq.cell, sq.score);
  }
  for (const auto& key : order) b.cells.push_back(rollup_cell(key, by_cell[key]));
  auto averages = average_over_domains(b.cells);
  b.cells.insert(b.cells.end(), averages.begin(), averages.end());

  // Deltas only for (domain, model) pairs scored under both regimes.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> regimes;
  for (const auto& c : b.cells) regimes[{c.key.domain, c.key.model}].insert(c.key.regime);
  std::vector<CellRollup> paired;
  for (const auto& c : b.cells) {
    if (regimes[{c.key.domain, c.key.model}].size() == 2) paired.push_back(c);
  }
  b.deltas = regime_delta(paired);

  b.markdown = "# F1 by extraction group\n\n" + rollup_markdown(b.cells);
  if (!b.deltas.empty()) {
    b.markdown += "\n# Per-paper to global F1 drop\n\n| Domain | Model | Per-paper | Global | Drop |\n|---|---|---|---|---|\n";
    for (const auto& d : b.deltas) {
      b.markdown += "| " + d.domain + " | " + d.model + " | " + format_2dp(d.per_paper_f1) + " | " +
                    format_2dp(d.global_f1) + " | " + format_2dp(d.drop) + " |\n";
    }
  }
  b.per_query_csv = per_query_csv(rows);
  b.rollup["cells"] = nlohmann::json::array();
  for (const auto& c : b.cells) b.rollup["cells"].push_back(to_json(c));
  b.rollup["deltas"] = nlohmann::json::array();
  for (const auto& d : b.deltas) b.rollup["deltas"].push_back(delta_json(d));
  return b;
}

ReportBundle cmd_report(const RunConfig& config) {
  const auto corpora = load_corpora(config);
  const auto scores = load_scores(config, corpora);
  if (scores.empty()) throw InputError("no score files under " + config.out.string() + "; run score first");
  ReportBundle b = build_report(scores);
  write_text(config.out / "report.md", b.markdown);
  write_text(config.out / "per_query.csv", b.per_query_csv);
  write_json(config.out / "rollup.json", b.rollup);
  write_text(config.out / "regime_delta.csv", regime_delta_csv(b.deltas));
  return b;
}

}  // namespace evidx
