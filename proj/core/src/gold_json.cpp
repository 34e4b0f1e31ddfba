#include "evidx/gold_json.hpp"

#include <fstream>
#include <sstream>

#include "evidx/error.hpp"

namespace evidx {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("gold JSON: " + path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path, std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> as_optional_string(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return as_string(obj.at(key), path + "." + key);
}

Decimal as_decimal(const json& v, const std::string& path) {
  std::optional<Decimal> d;
  if (v.is_number()) d = Decimal::parse(v.dump());
  else if (v.is_string()) d = Decimal::parse_lenient(v.get<std::string>());
  if (!d) fail(path, "expected a number");
  return *d;
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& path) {
  std::vector<std::string> out;
  if (!obj.contains(key) || obj.at(key).is_null()) return out;
  const json& arr = obj.at(key);
  if (!arr.is_array()) fail(path + "." + key, "expected an array");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(as_string(arr[k], path + "." + key + "[" + std::to_string(k) + "]"));
  }
  return out;
}

const json& array_field(const json& obj, const char* key, const std::string& path) {
  static const json empty = json::array();
  if (!obj.contains(key) || obj.at(key).is_null()) return empty;
  if (!obj.at(key).is_array()) fail(path + "." + key, "expected an array");
  return obj.at(key);
}

GoldRecord parse_record(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  GoldRecord r;
  const json& id = require(obj, "doc_id", path);
  if (!id.is_number_integer()) fail(path + ".doc_id", "expected an integer");
  r.doc_id = id.get<DocId>();
  if (obj.contains("doi") && !obj.at("doi").is_null()) r.doi = as_string(obj.at("doi"), path + ".doi");
  r.populations = string_list(obj, "populations", path);
  r.geolocations = string_list(obj, "geolocations", path);

  const json& sizes = array_field(obj, "sample_sizes", path);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    r.sample_sizes.push_back(as_decimal(sizes[k], path + ".sample_sizes[" + std::to_string(k) + "]"));
  }

  const json& vars = array_field(obj, "variables", path);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string vp = path + ".variables[" + std::to_string(k) + "]";
    const json& v = vars[k];
    if (!v.is_object()) fail(vp, "expected an object");
    VariableEntry entry;
    entry.name = as_string(require(v, "name", vp), vp + ".name");
    const std::string role = as_string(require(v, "role", vp), vp + ".role");
    if (role == "IV") entry.role = Role::kIV;
    else if (role == "DV") entry.role = Role::kDV;
    else fail(vp + ".role", "expected \"IV\" or \"DV\", got \"" + role + "\"");
    entry.scale = as_optional_string(v, "scale", vp);
    entry.unit = as_optional_string(v, "unit", vp);
    r.variables.push_back(std::move(entry));
  }

  const json& assocs = array_field(obj, "associations", path);
  for (std::size_t k = 0; k < assocs.size(); ++k) {
    const std::string ap = path + ".associations[" + std::to_string(k) + "]";
    const json& a = assocs[k];
    if (!a.is_object()) fail(ap, "expected an object");
    AssociationEntry entry;
    entry.iv = as_string(require(a, "iv", ap), ap + ".iv");
    entry.dv = as_string(require(a, "dv", ap), ap + ".dv");
    entry.method = as_string(require(a, "method", ap), ap + ".method");
    entry.condition = as_optional_string(a, "condition", ap);
    const json& effect = require(a, "effect", ap);
    if (!effect.is_object()) fail(ap + ".effect", "expected an object");
    entry.effect.label = as_string(require(effect, "family", ap + ".effect"), ap + ".effect.family");
    entry.effect.family = effect_family_from_label(entry.effect.label);
    entry.effect.value = as_decimal(require(effect, "value", ap + ".effect"), ap + ".effect.value");
    r.associations.push_back(std::move(entry));
  }

  const json& links = array_field(obj, "population_links", path);
  for (std::size_t k = 0; k < links.size(); ++k) {
    const std::string lp = path + ".population_links[" + std::to_string(k) + "]";
    const json& l = links[k];
    if (!l.is_object()) fail(lp, "expected an object");
    PopulationLink link;
    link.population = as_string(require(l, "population", lp), lp + ".population");
    link.geolocation = as_optional_string(l, "geolocation", lp);
    if (l.contains("sample_size") && !l.at("sample_size").is_null()) {
      link.sample_size = as_decimal(l.at("sample_size"), lp + ".sample_size");
    }
    r.population_links.push_back(std::move(link));
  }
  return r;
}

json decimal_json(const Decimal& d) { return json::parse(d.to_string()); }

json optional_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

GoldFile parse_gold_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("gold JSON: parse error: ") + e.what());
  }
  if (!root.is_object()) fail("$", "expected an object");
  GoldFile file;
  if (root.contains("domain") && !root.at("domain").is_null()) file.domain = as_string(root.at("domain"), "domain");
  const json& docs = require(root, "documents", "$");
  if (!docs.is_array()) fail("documents", "expected an array");
  for (std::size_t k = 0; k < docs.size(); ++k) {
    file.documents.push_back(parse_record(docs[k], "documents[" + std::to_string(k) + "]"));
  }
  return file;
}

GoldFile load_gold_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open gold file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_gold_json(buf.str());
}

json to_json(const GoldRecord& r) {
  json out;
  out["doc_id"] = r.doc_id;
  out["doi"] = r.doi;
  out["populations"] = r.populations;
  out["geolocations"] = r.geolocations;
  out["sample_sizes"] = json::array();
  for (const auto& n : r.sample_sizes) out["sample_sizes"].push_back(decimal_json(n));
  out["variables"] = json::array();
  for (const auto& v : r.variables) {
    out["variables"].push_back(
        {{"name", v.name}, {"role", role_name(v.role)}, {"scale", optional_json(v.scale)}, {"unit", optional_json(v.unit)}});
  }
  out["associations"] = json::array();
  for (const auto& a : r.associations) {
    out["associations"].push_back({{"iv", a.iv},
                                   {"dv", a.dv},
                                   {"method", a.method},
                                   {"condition", optional_json(a.condition)},
                                   {"effect", {{"family", a.effect.label}, {"value", decimal_json(a.effect.value)}}}});
  }
  if (!r.population_links.empty()) {
    out["population_links"] = json::array();
    for (const auto& l : r.population_links) {
      out["population_links"].push_back({{"population", l.population},
                                         {"geolocation", optional_json(l.geolocation)},
                                         {"sample_size", l.sample_size ? decimal_json(*l.sample_size) : json(nullptr)}});
    }
  }
  return out;
}

json to_json(const GoldFile& file) {
  json out;
  out["domain"] = file.domain;
  out["documents"] = json::array();
  for (const auto& r : file.documents) out["documents"].push_back(to_json(r));
  return out;
}

}  // namespace evidx
