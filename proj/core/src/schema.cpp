#include "evidx/schema.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "evidx/error.hpp"
#include "evidx/text.hpp"

namespace evidx {
namespace {

std::string indexed(std::string_view field, std::size_t index) {
  return std::string(field) + "[" + std::to_string(index) + "]";
}

void error(ValidationReport& report, std::string path, std::string message) {
  report.violations.push_back({Violation::Severity::kError, std::move(path), std::move(message)});
}

void warning(ValidationReport& report, std::string path, std::string message) {
  report.violations.push_back({Violation::Severity::kWarning, std::move(path), std::move(message)});
}

SlotValue text_or_null(const std::optional<std::string>& value) {
  if (!value) return std::monostate{};
  return *value;
}

SlotValue number_or_null(const std::optional<Decimal>& value) {
  if (!value) return std::monostate{};
  return *value;
}

// Insertion-ordered tuple set keyed by tuple_identity.
class TupleSet {
 public:
  TupleSet(DocId doc, std::string query_id) : doc_(doc), query_id_(std::move(query_id)) {}

  void add(std::vector<Field> fields) {
    StudyTuple tuple{doc_, query_id_, std::move(fields)};
    if (seen_.insert(tuple_identity(tuple)).second) tuples_.push_back(std::move(tuple));
  }

  std::vector<StudyTuple> take() { return std::move(tuples_); }

 private:
  DocId doc_;
  std::string query_id_;
  std::set<std::string> seen_;
  std::vector<StudyTuple> tuples_;
};

}  // namespace

std::string_view role_name(Role role) { return role == Role::kIV ? "IV" : "DV"; }

EffectFamily effect_family_from_label(std::string_view label) {
  if (label == "r") return EffectFamily::kR;
  if (label == "beta" || label == "β") return EffectFamily::kBeta;
  if (label == "R") return EffectFamily::kMultipleR;
  if (label == "R2" || label == "R²" || label == "R^2") return EffectFamily::kR2;
  if (label == "OR") return EffectFamily::kOddsRatio;
  return EffectFamily::kOther;
}

std::optional<Decimal> GoldRecord::sample_size_total() const {
  if (sample_sizes.empty()) return std::nullopt;
  Decimal total;
  for (const Decimal& n : sample_sizes) total = total + n;
  return total;
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(), [](const Violation& v) {
    return v.severity == Violation::Severity::kError;
  }));
}

std::size_t ValidationReport::warning_count() const { return violations.size() - error_count(); }

ValidationReport validate_gold(const GoldRecord& record) {
  ValidationReport report;
  if (record.doc_id <= 0) error(report, "doc_id", "doc_id must be a positive integer");

  for (std::size_t k = 0; k < record.sample_sizes.size(); ++k) {
    const Decimal& n = record.sample_sizes[k];
    if (!n.is_integer()) error(report, indexed("sample_sizes", k), "sample size must be an integer");
    if (n < Decimal()) error(report, indexed("sample_sizes", k), "sample size must be non-negative");
  }

  std::set<std::string> iv_names, dv_names;
  for (std::size_t k = 0; k < record.variables.size(); ++k) {
    const VariableEntry& v = record.variables[k];
    const std::string name = normalize(v.name);
    if (name.empty()) error(report, indexed("variables", k) + ".name", "variable name is empty after normalization");
    (v.role == Role::kIV ? iv_names : dv_names).insert(name);
    if (v.scale.has_value() != v.unit.has_value()) {
      warning(report, indexed("variables", k), "scale/unit pair is one-sided");
    }
  }

  for (std::size_t j = 0; j < record.associations.size(); ++j) {
    const AssociationEntry& a = record.associations[j];
    const std::string path = indexed("associations", j);
    const std::string iv = normalize(a.iv);
    const std::string dv = normalize(a.dv);
    if (iv == dv) error(report, path, "iv and dv are the same variable");
    if (!iv_names.contains(iv)) error(report, path + ".iv", "'" + a.iv + "' is not declared as an IV variable");
    if (!dv_names.contains(dv)) error(report, path + ".dv", "'" + a.dv + "' is not declared as a DV variable");
    if (normalize(a.method).empty()) error(report, path + ".method", "method is empty");

    const Decimal& value = a.effect.value;
    const std::string vpath = path + ".effect.value";
    switch (a.effect.family) {
      case EffectFamily::kR:
        if (value < Decimal::from_int(-1) || value > Decimal::from_int(1)) {
          error(report, vpath, "r must lie in [-1, 1], got " + value.to_string());
        }
        break;
      case EffectFamily::kR2:
        if (value < Decimal() || value > Decimal::from_int(1)) {
          error(report, vpath, "R2 must lie in [0, 1], got " + value.to_string());
        }
        break;
      case EffectFamily::kOddsRatio:
        if (value <= Decimal()) error(report, vpath, "OR must be positive, got " + value.to_string());
        break;
      default:
        break;
    }
  }

  std::set<std::string> populations, countries;
  for (const auto& p : record.populations) populations.insert(normalize(p));
  for (const auto& g : record.geolocations) countries.insert(normalize(g));
  for (std::size_t k = 0; k < record.population_links.size(); ++k) {
    const PopulationLink& link = record.population_links[k];
    const std::string path = indexed("population_links", k);
    if (!populations.contains(normalize(link.population))) {
      error(report, path + ".population", "'" + link.population + "' is not listed in populations");
    }
    if (link.geolocation && !countries.contains(normalize(*link.geolocation))) {
      error(report, path + ".geolocation", "'" + *link.geolocation + "' is not listed in geolocations");
    }
    if (link.sample_size &&
        std::find(record.sample_sizes.begin(), record.sample_sizes.end(), *link.sample_size) ==
            record.sample_sizes.end()) {
      error(report, path + ".sample_size", link.sample_size->to_string() + " is not listed in sample_sizes");
    }
  }
  return report;
}

ValidationReport validate_gold_set(const std::vector<GoldRecord>& records) {
  ValidationReport report;
  std::map<DocId, std::size_t> first_seen;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string prefix = indexed("documents", k) + ".";
    auto [it, inserted] = first_seen.emplace(records[k].doc_id, k);
    if (!inserted) {
      error(report, prefix + "doc_id",
            "duplicate doc_id " + std::to_string(records[k].doc_id) + " (first at documents[" +
                std::to_string(it->second) + "])");
    }
    for (Violation v : validate_gold(records[k]).violations) {
      v.path = prefix + v.path;
      report.violations.push_back(std::move(v));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string_view slot_name(Slot slot) {
  switch (slot) {
    case Slot::kG: return "G";
    case Slot::kN: return "N";
    case Slot::kP: return "P";
    case Slot::kA: return "A";
    case Slot::kV: return "V";
    case Slot::kIV: return "IV";
    case Slot::kDV: return "DV";
    case Slot::kS: return "S";
    case Slot::kU: return "U";
    case Slot::kC: return "C";
    case Slot::kE: return "E";
    case Slot::kCount: return "count";
    case Slot::kValue: return "value";
  }
  return "?";
}

std::optional<Slot> slot_from_name(std::string_view name) {
  for (Slot s : {Slot::kG, Slot::kN, Slot::kP, Slot::kA, Slot::kV, Slot::kIV, Slot::kDV, Slot::kS, Slot::kU,
                 Slot::kC, Slot::kE, Slot::kCount, Slot::kValue}) {
    if (slot_name(s) == name) return s;
  }
  return std::nullopt;
}

SlotKind slot_kind(Slot slot) {
  switch (slot) {
    case Slot::kN:
    case Slot::kE:
    case Slot::kCount:
    case Slot::kValue:
      return SlotKind::kNumeric;
    default:
      return SlotKind::kText;
  }
}

bool is_null(const SlotValue& value) { return std::holds_alternative<std::monostate>(value); }

std::string value_to_string(const SlotValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* d = std::get_if<Decimal>(&value)) return d->to_string();
  return "null";
}

const SlotValue* StudyTuple::get(Slot slot) const {
  for (const Field& f : fields) {
    if (f.slot == slot) return &f.value;
  }
  return nullptr;
}

std::string tuple_identity(const StudyTuple& tuple) {
  std::string key = std::to_string(tuple.doc_id);
  key += '\x1f';
  key += tuple.query_id;
  for (const Field& f : tuple.fields) {
    key += '\x1f';
    key += slot_name(f.slot);
    key += '=';
    if (const auto* s = std::get_if<std::string>(&f.value)) {
      key += 's';
      key += normalize(*s);
    } else if (const auto* d = std::get_if<Decimal>(&f.value)) {
      key += 'n';
      key += d->to_string();
    } else {
      key += '0';
    }
  }
  return key;
}

nlohmann::ordered_json tuple_to_json(const StudyTuple& tuple, bool with_doc) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  if (with_doc) out["doc"] = tuple.doc_id;
  for (const Field& f : tuple.fields) {
    const std::string key(slot_name(f.slot));
    if (const auto* s = std::get_if<std::string>(&f.value)) {
      out[key] = *s;
    } else if (const auto* d = std::get_if<Decimal>(&f.value)) {
      out[key] = nlohmann::ordered_json::parse(d->to_string());
    } else {
      out[key] = nullptr;
    }
  }
  return out;
}

StudyTuple tuple_from_json(const nlohmann::json& object, const QuerySpec& query) {
  if (!object.is_object()) throw InputError("tuple for " + query.id + " is not a JSON object");
  StudyTuple tuple;
  tuple.query_id = query.id;
  if (query.document_attributed) {
    if (!object.contains("doc") || !object["doc"].is_number_integer()) {
      throw InputError("tuple for " + query.id + " lacks an integer \"doc\"");
    }
    tuple.doc_id = object["doc"].get<DocId>();
  }
  for (Slot slot : query.slots) {
    const std::string key(slot_name(slot));
    if (!object.contains(key)) throw InputError("tuple for " + query.id + " lacks slot " + key);
    const nlohmann::json& v = object[key];
    SlotValue value;
    if (v.is_null()) {
      value = std::monostate{};
    } else if (slot_kind(slot) == SlotKind::kNumeric) {
      auto d = v.is_string() ? Decimal::parse_lenient(v.get<std::string>()) : Decimal::parse(v.dump());
      if (!d) throw InputError("slot " + key + " of " + query.id + " is not numeric: " + v.dump());
      value = *d;
    } else {
      value = v.is_string() ? v.get<std::string>() : v.dump();
    }
    tuple.fields.push_back({slot, std::move(value)});
  }
  return tuple;
}

std::vector<std::string> distinct_names(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (seen.insert(normalize(name)).second) out.push_back(name);
  }
  return out;
}

std::vector<StudyTuple> project_gold(const GoldRecord& record, const QuerySpec& query) {
  if (query.level == Level::kC) {
    throw InputError(query.id + " is a derived query; its ground truth comes from the oracle");
  }
  TupleSet set(record.doc_id, query.id);
  const std::string& id = query.id;

  auto links_or_cross = [&](bool with_g, bool with_n) {
    if (!record.population_links.empty()) {
      for (const PopulationLink& link : record.population_links) {
        std::vector<Field> fields{{Slot::kP, link.population}};
        if (with_g) fields.push_back({Slot::kG, text_or_null(link.geolocation)});
        if (with_n) fields.push_back({Slot::kN, number_or_null(link.sample_size)});
        set.add(std::move(fields));
      }
      return;
    }
    std::vector<SlotValue> gs, ns;
    for (const auto& g : record.geolocations) gs.emplace_back(g);
    for (const auto& n : record.sample_sizes) ns.emplace_back(n);
    if (gs.empty()) gs.emplace_back(std::monostate{});
    if (ns.empty()) ns.emplace_back(std::monostate{});
    if (!with_g) gs = {std::monostate{}};
    if (!with_n) ns = {std::monostate{}};
    for (const auto& p : record.populations) {
      for (const auto& g : gs) {
        for (const auto& n : ns) {
          std::vector<Field> fields{{Slot::kP, p}};
          if (with_g) fields.push_back({Slot::kG, g});
          if (with_n) fields.push_back({Slot::kN, n});
          set.add(std::move(fields));
        }
      }
    }
  };

  auto variables_with = [&](std::optional<Role> role, bool with_scale_unit) {
    for (const VariableEntry& v : record.variables) {
      if (role && v.role != *role) continue;
      std::vector<Field> fields{{query.slots.front(), v.name}};
      if (with_scale_unit) {
        fields.push_back({Slot::kS, text_or_null(v.scale)});
        fields.push_back({Slot::kU, text_or_null(v.unit)});
      }
      set.add(std::move(fields));
    }
  };

  if (id == "O_L1_Q1") {
    for (const auto& g : record.geolocations) set.add({{Slot::kG, g}});
  } else if (id == "O_L1_Q2") {
    if (record.sample_sizes.empty()) set.add({{Slot::kN, std::monostate{}}});
    for (const auto& n : record.sample_sizes) set.add({{Slot::kN, n}});
  } else if (id == "O_L1_Q3") {
    for (const auto& p : record.populations) set.add({{Slot::kP, p}});
  } else if (id == "O_L2_Q1") {
    links_or_cross(false, true);
  } else if (id == "O_L2_Q2") {
    links_or_cross(true, false);
  } else if (id == "O_L2_Q3") {
    links_or_cross(true, true);
  } else if (id == "M_L1_Q1") {
    for (const auto& a : record.associations) set.add({{Slot::kA, a.method}});
  } else if (id == "M_L1_Q2") {
    variables_with(std::nullopt, false);
  } else if (id == "M_L1_Q3") {
    variables_with(Role::kIV, false);
  } else if (id == "M_L1_Q4") {
    variables_with(Role::kDV, false);
  } else if (id == "M_L2_Q1") {
    variables_with(std::nullopt, true);
  } else if (id == "M_L2_Q2") {
    variables_with(Role::kIV, true);
  } else if (id == "M_L2_Q3") {
    variables_with(Role::kDV, true);
  } else if (id == "M_L2_Q4") {
    for (const auto& a : record.associations) set.add({{Slot::kIV, a.iv}, {Slot::kDV, a.dv}});
  } else if (id == "M_L2_Q5") {
    for (const auto& a : record.associations) {
      set.add({{Slot::kIV, a.iv}, {Slot::kDV, a.dv}, {Slot::kA, a.method}});
    }
  } else if (id == "M_L2_Q6") {
    for (const auto& a : record.associations) {
      set.add({{Slot::kIV, a.iv},
               {Slot::kDV, a.dv},
               {Slot::kA, a.method},
               {Slot::kC, text_or_null(a.condition)},
               {Slot::kE, a.effect.value}});
    }
  } else {
    throw InputError("no projection rule for query " + id);
  }
  return set.take();
}

}  // namespace evidx
