#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "evidx/matcher.hpp"
#include "evidx/metrics.hpp"

namespace evidx::testing {
namespace fs = std::filesystem;

fs::path fixture_root() { return fs::path(EVIDX_FIXTURE_DIR); }

fs::path fixture_path(const std::string& relative) { return fixture_root() / relative; }

const std::vector<std::string>& fixture_domains() {
  static const std::vector<std::string> domains{"agricultural", "civil_engineering", "earth_environmental",
                                                "medical", "social"};
  return domains;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(read_text(path)); }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("evidx-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

StudyTuple tuple_of(DocId doc, const std::string& query_id, std::vector<Field> fields) {
  StudyTuple t;
  t.doc_id = doc;
  t.query_id = query_id;
  t.fields = std::move(fields);
  return t;
}

Field text(Slot slot, const std::string& value) { return Field{slot, SlotValue{value}}; }

Field number(Slot slot, const std::string& value) { return Field{slot, SlotValue{*Decimal::parse(value)}}; }

Field null_field(Slot slot) { return Field{slot, SlotValue{}}; }

namespace {

bool pair_passes(const StudyTuple& p, const StudyTuple& g) {
  if (p.doc_id != g.doc_id || p.fields.size() != g.fields.size()) return false;
  for (std::size_t k = 0; k < p.fields.size(); ++k) {
    const Slot s = p.fields[k].slot;
    const SlotValue* gv = g.get(s);
    if (!gv) return false;
    if (!passes(slot_match(p.fields[k].value, *gv, slot_kind(s), nullptr, {}).outcome)) return false;
  }
  return true;
}

}  // namespace

std::size_t exhaustive_max_correct(const std::vector<StudyTuple>& predictions, const std::vector<StudyTuple>& gold) {
  std::vector<std::vector<bool>> ok(predictions.size(), std::vector<bool>(gold.size()));
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    for (std::size_t g = 0; g < gold.size(); ++g) ok[p][g] = pair_passes(predictions[p], gold[g]);
  }
  std::vector<bool> used(gold.size(), false);
  std::function<std::size_t(std::size_t)> best = [&](std::size_t p) -> std::size_t {
    if (p == predictions.size()) return 0;
    std::size_t top = best(p + 1);
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (used[g] || !ok[p][g]) continue;
      used[g] = true;
      top = std::max(top, 1 + best(p + 1));
      used[g] = false;
    }
    return top;
  };
  return best(0);
}

namespace {

const std::vector<std::string> kBases{
    "socioeconomic status index", "mean annual precipitation", "compressive strength",
    "household food security",    "body mass index",           "soil organic carbon",
    "distance to market",         "depression",                "age",
    "rainfall",                   "kenya",                     "ordinary least squares",
};

std::string variant(const std::string& base, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  std::string s = base;
  switch (pick(rng)) {
    case 0:
      return s;
    case 1:
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return s;
    case 2:
      return "  " + s + ". ";
    case 3: {
      std::uniform_int_distribution<std::size_t> at(0, s.size() - 1);
      s.erase(at(rng), 1);
      return s;
    }
    default: {
      std::uniform_int_distribution<std::size_t> at(0, s.size() - 1);
      s[at(rng)] = 'x';
      return s;
    }
  }
}

struct Shape {
  const char* query;
  std::vector<Slot> slots;
};

}  // namespace

MatchingInstance random_matching_instance(std::mt19937_64& rng) {
  static const std::vector<Shape> shapes{
      {"O_L1_Q2", {Slot::kN}},
      {"M_L1_Q2", {Slot::kV}},
      {"M_L2_Q4", {Slot::kIV, Slot::kDV}},
      {"O_L2_Q1", {Slot::kP, Slot::kN}},
      {"M_L2_Q5", {Slot::kIV, Slot::kDV, Slot::kA}},
  };
  static const std::vector<std::string> numbers{"10", "20", "20.0", "150", "1500", "7.5"};
  std::uniform_int_distribution<std::size_t> shape_pick(0, shapes.size() - 1);
  std::uniform_int_distribution<std::size_t> count(0, 6);
  std::uniform_int_distribution<DocId> doc(1, 2);
  std::uniform_int_distribution<std::size_t> base_pick(0, kBases.size() - 1);
  std::uniform_int_distribution<std::size_t> number_pick(0, numbers.size() - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  const Shape& shape = shapes[shape_pick(rng)];

  auto fresh = [&](DocId d) {
    std::vector<Field> fields;
    for (Slot s : shape.slots) {
      if (slot_kind(s) == SlotKind::kNumeric) {
        fields.push_back(number_pick(rng) == 0 ? null_field(s) : number(s, numbers[number_pick(rng)]));
      } else {
        fields.push_back(text(s, kBases[base_pick(rng)]));
      }
    }
    return tuple_of(d, shape.query, std::move(fields));
  };

  MatchingInstance inst;
  const std::size_t n_gold = count(rng);
  for (std::size_t k = 0; k < n_gold; ++k) inst.gold.push_back(fresh(doc(rng)));
  const std::size_t n_pred = count(rng);
  for (std::size_t k = 0; k < n_pred; ++k) {
    if (inst.gold.empty() || coin(rng) == 0) {
      inst.predictions.push_back(fresh(doc(rng)));
      continue;
    }
    std::uniform_int_distribution<std::size_t> g(0, inst.gold.size() - 1);
    StudyTuple t = inst.gold[g(rng)];
    for (Field& f : t.fields) {
      if (const auto* s = std::get_if<std::string>(&f.value)) f.value = variant(*s, rng);
      else if (coin(rng) == 0) f.value = *Decimal::parse(numbers[number_pick(rng)]);
    }
    if (coin(rng) == 0) t.doc_id = doc(rng);
    inst.predictions.push_back(std::move(t));
  }
  return inst;
}

std::vector<ScoredQuery> planted_taxonomy_cells() {
  const std::string q = "M_L2_Q5";
  auto t = [&](DocId d, const std::string& iv, const std::string& dv, const std::string& a) {
    return tuple_of(d, q, {text(Slot::kIV, iv), text(Slot::kDV, dv), text(Slot::kA, a)});
  };
  std::vector<StudyTuple> gold{
      t(1, "age", "income", "ols"),
      t(1, "education", "income", "ols"),
      t(1, "rainfall", "yield", "anova"),
      t(1, "temperature", "yield", "anova"),
      t(1, "income", "age", "probit"),
      t(1, "soil ph", "yield", "pearson correlation"),
      t(1, "tenure", "adoption", "logit"),
      t(1, "distance", "adoption", "logit"),
      t(2, "stress", "sleep quality", "pearson correlation"),
      t(2, "exercise", "sleep quality", "spearman correlation"),
      t(2, "body mass index", "blood pressure", "ols"),
  };
  std::vector<StudyTuple> predictions{
      // correct
      t(1, "age", "income", "ols"),
      t(2, "stress", "sleep quality", "pearson correlation"),
      t(1, "tenure", "adoption", "logit"),
      // role swaps; the third also has a gold pair with another method
      t(1, "yield", "rainfall", "anova"),
      t(2, "sleep quality", "exercise", "spearman correlation"),
      t(1, "age", "income", "probit"),
      // binding drift
      t(1, "temperature", "yield", "pearson correlation"),
      t(2, "body mass index", "blood pressure", "logit"),
      // unrelated
      t(1, "slope", "erosion", "ols"),
      t(1, "tenure", "yield", "logit"),
      t(2, "caffeine", "sleep quality", "pearson correlation"),
      t(2, "income", "anxiety", "ols"),
      t(1, "rainfall", "adoption", "logit"),
  };
  ScoredQuery sq;
  sq.cell = CellKey{"planted", "fixture-model", "per-paper"};
  sq.score = score_tuple_list(query_by_id(q), "per-paper", std::move(predictions), std::move(gold), nullptr);
  return {sq};
}

std::vector<ScoredQuery> table6_average_scores() {
  const nlohmann::json fixture = read_json(fixture_path("table6_average.json"));
  std::vector<ScoredQuery> out;
  for (const auto& row : fixture.at("rows")) {
    const double f1 = row.at("all_f1").get<double>();
    for (const auto& q : registry()) {
      ScoredQuery sq;
      sq.cell = CellKey{fixture.at("domain").get<std::string>(), row.at("model").get<std::string>(),
                        row.at("regime").get<std::string>()};
      sq.score.query_id = q.id;
      sq.score.regime = sq.cell.regime;
      sq.score.kind = q.scoring();
      sq.score.prf = PRF{f1, f1, f1};
      out.push_back(std::move(sq));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files.emplace_back(fs::relative(entry.path(), root).generic_string(), read_text(entry.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace evidx::testing
