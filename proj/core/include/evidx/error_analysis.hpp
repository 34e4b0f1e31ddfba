#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/metrics.hpp"

namespace evidx {

/// One scored query within a (domain, model, regime) cell.
struct ScoredQuery {
  CellKey cell;
  QueryScore score;
};

struct TaxonomyInstance {
  CellKey cell;
  std::string query_id;
  std::size_t pred_index = 0;
  std::optional<std::size_t> gold_index;  // gold the corrected prediction would match
  DocId doc_id = 0;
};

struct Classification {
  std::size_t count = 0;
  std::size_t denominator = 0;  // spurious predictions in scope
  std::vector<TaxonomyInstance> instances;

  double ratio() const;
};

/// "15.5%": count/denominator as a percentage with one decimal, half-up,
/// computed in integers. "n/a" for a zero denominator.
std::string format_percent(std::size_t count, std::size_t denominator);

/// Spurious predictions in M_L2_Q4..Q6 that pass judge-free slot matching
/// against an unconsumed gold tuple of the same document once IV and DV are
/// exchanged. M_L2_Q6 compares only (IV, DV). Each swap consumes its gold.
Classification detect_role_swaps(const std::vector<ScoredQuery>& scores);

/// Spurious per-paper predictions in M_L2_Q5..Q6 whose (IV, DV) pair exists in
/// the document's gold but no gold tuple with that pair accepts the remaining
/// slots. Predictions already counted as swaps are excluded.
Classification detect_binding_drift(const std::vector<ScoredQuery>& scores);

struct DensityBucket {
  std::string label;             // "0", "1-5", "6-10", "11-20", "21-30", ">=31"
  std::size_t papers = 0;
  std::optional<double> mean_recall;  // absent for the "0" bucket
};

struct DensityReport {
  std::vector<DensityBucket> buckets;  // non-empty buckets only
  std::vector<std::string> notes;
};

/// Per-document recall of per-paper M_L2_Q6, bucketed by gold tuple count.
/// `documents` lists every document of the cell's corpus so that documents
/// without gold tuples land in bucket "0".
DensityReport recall_by_density(const std::vector<std::pair<const QueryScore*, std::vector<DocId>>>& cells);

struct AmplificationRow {
  std::string derived_query;
  std::string upstream_query;
  std::size_t cells = 0;
  double success_rate = 0.0;
  double upstream_f1 = 0.0;
  bool partial = false;
};

/// Upstream extraction query for each derived query.
const std::map<std::string, std::string>& amplification_upstream();

/// Per derived query: mean cell success versus the mean F1 of its upstream
/// query over the same cells.
std::vector<AmplificationRow> amplification_report(const std::vector<ScoredQuery>& scores);

struct TaxonomyReport {
  Classification swaps;
  Classification drift;
  DensityReport density;
  std::vector<AmplificationRow> amplification;
};

nlohmann::json to_json(const TaxonomyReport& report);
std::string taxonomy_markdown(const TaxonomyReport& report);

}  // namespace evidx
