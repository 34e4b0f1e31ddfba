#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/error_analysis.hpp"
#include "evidx/schema.hpp"

namespace evidx::testing {

std::filesystem::path fixture_root();
std::filesystem::path fixture_path(const std::string& relative);
const std::vector<std::string>& fixture_domains();
nlohmann::json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

StudyTuple tuple_of(DocId doc, const std::string& query_id, std::vector<Field> fields);
Field text(Slot slot, const std::string& value);
Field number(Slot slot, const std::string& value);
Field null_field(Slot slot);

/// Largest number of one-to-one (prediction, gold) pairs with equal doc_id in
/// which every slot passes the judge-free slot test. Plain backtracking.
std::size_t exhaustive_max_correct(const std::vector<StudyTuple>& predictions, const std::vector<StudyTuple>& gold);

struct MatchingInstance {
  std::vector<StudyTuple> predictions;
  std::vector<StudyTuple> gold;
};

/// Up to 6 predictions and 6 gold tuples over two documents, drawing values
/// from a pool that mixes exact copies, case and spacing variants, one-letter
/// typos and unrelated names.
MatchingInstance random_matching_instance(std::mt19937_64& rng);

/// One per-paper M_L2_Q5 cell with 10 spurious predictions: 3 role swaps
/// (one of which also looks like binding drift), 2 binding drifts and 5
/// unrelated pairs, plus correct predictions that are not counted.
std::vector<ScoredQuery> planted_taxonomy_cells();

/// Score fixture holding the average row of the published F1 table: every
/// query of a (model, regime) cell carries that row's All figure.
std::vector<ScoredQuery> table6_average_scores();

/// Every regular file under `root`, as relative path -> contents.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);

}  // namespace evidx::testing
