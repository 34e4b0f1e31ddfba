#include "evidx/query_engine.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "evidx/error.hpp"

namespace evidx {
namespace {

constexpr std::string_view kPerDocPrefix = "For the document provided, ";
constexpr std::string_view kEachDocPrefix = "For each document, ";

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string rescope(const std::string& text) {
  if (text.starts_with(kPerDocPrefix)) return text;
  if (text.starts_with(kEachDocPrefix)) return std::string(kPerDocPrefix) + text.substr(kEachDocPrefix.size());
  return std::string(kPerDocPrefix) + lower_first(text);
}

std::string_view slot_description(Slot slot) {
  switch (slot) {
    case Slot::kG: return "country where the study was conducted";
    case Slot::kN: return "sample size as a number";
    case Slot::kP: return "study population or unit of analysis";
    case Slot::kA: return "statistical method";
    case Slot::kV: return "variable name";
    case Slot::kIV: return "independent variable";
    case Slot::kDV: return "dependent variable";
    case Slot::kS: return "measurement scale";
    case Slot::kU: return "measurement unit";
    case Slot::kC: return "condition qualifying the estimate, or null";
    case Slot::kE: return "effect size value as a number";
    case Slot::kCount: return "the count as an integer";
    case Slot::kValue: return "the numeric answer";
  }
  return "";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Collects candidate JSON objects from a response, tolerating prose, code
// fences, a top-level array, or one pretty-printed object.
std::vector<nlohmann::json> extract_objects(std::string_view text, std::vector<std::string>& warnings) {
  std::string body;
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    if (!line.starts_with("```")) {
      lines.emplace_back(line);
      body += line;
      body += '\n';
    }
    start = end + 1;
  }

  std::vector<nlohmann::json> objects;
  const std::string_view whole = trim(body);
  if (whole.starts_with("[")) {
    auto parsed = nlohmann::json::parse(whole, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_array()) {
      for (auto& element : parsed) {
        if (element.is_object()) objects.push_back(std::move(element));
        else warnings.push_back("array element is not an object: " + element.dump().substr(0, 60));
      }
      return objects;
    }
  }

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    const auto open = line.find('{');
    const auto close = line.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) continue;
    auto parsed = nlohmann::json::parse(line.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      warnings.push_back("line " + std::to_string(n + 1) + ": invalid JSON object");
      continue;
    }
    objects.push_back(std::move(parsed));
  }

  if (objects.empty() && whole.starts_with("{")) {
    auto parsed = nlohmann::json::parse(whole, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) objects.push_back(std::move(parsed));
  }
  return objects;
}

std::optional<DocId> parse_doc_marker(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<DocId>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<DocId>(d))) return static_cast<DocId>(d);
    return std::nullopt;
  }
  if (v.is_string()) {
    static const std::regex marker_re(R"(\s*\[?\s*([0-9]+)\s*\]?\s*)");
    std::smatch m;
    const std::string s = v.get<std::string>();
    if (std::regex_match(s, m, marker_re)) return std::stoll(m[1].str());
  }
  return std::nullopt;
}

std::optional<SlotValue> parse_slot_value(Slot slot, const nlohmann::json& v) {
  if (v.is_null()) return SlotValue{std::monostate{}};
  if (slot_kind(slot) == SlotKind::kNumeric) {
    std::optional<Decimal> d;
    if (v.is_number()) d = Decimal::parse(v.dump());
    else if (v.is_string()) d = Decimal::parse_lenient(v.get<std::string>());
    if (!d) return std::nullopt;
    return SlotValue{*d};
  }
  if (v.is_string()) return SlotValue{v.get<std::string>()};
  if (v.is_number()) return SlotValue{v.dump()};
  return std::nullopt;
}

}  // namespace

std::string_view regime_name(Regime regime) { return regime == Regime::kPerPaper ? "per-paper" : "global"; }

std::optional<Regime> regime_from_name(std::string_view name) {
  if (name == "per-paper") return Regime::kPerPaper;
  if (name == "global") return Regime::kGlobal;
  return std::nullopt;
}

std::string InstructionHeader::fingerprint() const { return sha256_hex(text); }

const InstructionHeader& instruction_header(std::string_view version) {
  static const InstructionHeader v1{"v1", detail::kInstructionHeaderV1};
  if (version == "v1") return v1;
  throw InputError("unknown instruction header version '" + std::string(version) + "'");
}

QuerySpec rewrite_per_document(const QuerySpec& query) {
  if (query.scoring() == ScoringKind::kCorpusScalar) {
    if (query.slots == std::vector<Slot>{Slot::kN}) return query;
    const QuerySpec atom = rewrite_per_document(query_by_id("O_L1_Q2"));
    QuerySpec variant = query;
    variant.pattern = atom.pattern;
    variant.slots = atom.slots;
    variant.document_attributed = true;
    variant.text = atom.text;
    return variant;
  }
  QuerySpec variant = query;
  variant.text = rescope(query.text);
  return variant;
}

QuerySpec effective_query(const QuerySpec& query, Regime regime) {
  return regime == Regime::kPerPaper ? rewrite_per_document(query) : query;
}

std::string output_contract(const QuerySpec& query) {
  std::string out;
  if (!query.document_attributed) {
    out += "Respond with a single JSON object on one line and no other text, with exactly this key:\n";
  } else {
    out += "Respond with JSON lines: one JSON object per line, one line per extracted item, and no other text.\n";
    out += "Each object has exactly these keys:\n";
    out += "  \"doc\": the identifier k from the [k] marker of the source document\n";
  }
  for (Slot slot : query.slots) {
    out += "  \"";
    out += slot_name(slot);
    out += "\": ";
    out += slot_description(slot);
    out += '\n';
  }
  out += "Use null for a value that is not reported. Write numbers as plain JSON numbers.\n";
  return out;
}

PromptBundle render_prompt(const QuerySpec& query, Regime regime, const Corpus& corpus, std::optional<DocId> doc_id,
                           const InstructionHeader& header) {
  PromptBundle bundle;
  bundle.query_id = query.id;
  bundle.regime = regime;
  bundle.instruction_version = header.version;

  std::string documents;
  if (regime == Regime::kPerPaper) {
    if (!doc_id) throw InputError("per-paper prompt for " + query.id + " requires a document id");
    documents = render_document_block(corpus.document(*doc_id));
    bundle.doc_id = doc_id;
  } else {
    if (doc_id) throw InputError("global prompt for " + query.id + " must not name a document");
    documents = build_global_input(corpus);
  }

  const QuerySpec posed = effective_query(query, regime);
  std::string& p = bundle.prompt_text;
  p = header.text;
  if (!p.empty() && p.back() != '\n') p += '\n';
  p += '\n';
  p += documents;
  p += "\n=== QUERY ===\n";
  p += posed.text;
  p += "\n\n=== OUTPUT FORMAT ===\n";
  p += output_contract(posed);
  return bundle;
}

ParseResult parse_response(std::string_view text, const QuerySpec& query, Regime regime, std::optional<DocId> doc_id,
                           const std::set<DocId>& corpus_ids) {
  ParseResult result;
  const QuerySpec posed = effective_query(query, regime);
  std::vector<nlohmann::json> objects = extract_objects(text, result.warnings);

  if (!posed.document_attributed) {
    for (const auto& obj : objects) {
      if (!obj.contains("value")) continue;
      if (auto v = parse_slot_value(Slot::kValue, obj["value"])) {
        result.scalar = *v;
        return result;
      }
      result.warnings.push_back("non-numeric value: " + obj["value"].dump().substr(0, 60));
    }
    if (objects.empty()) {
      if (auto bare = Decimal::parse_lenient(text)) {
        result.scalar = SlotValue{*bare};
        return result;
      }
    }
    result.warnings.push_back("no scalar answer found");
    return result;
  }

  if (objects.empty() && !trim(text).empty()) result.warnings.push_back("no JSON objects found in response");

  std::set<std::string> expected;
  for (Slot s : posed.slots) expected.insert(std::string(slot_name(s)));

  std::size_t index = 0;
  for (const auto& obj : objects) {
    ++index;
    const std::string where = "object " + std::to_string(index);
    std::set<std::string> keys;
    for (const auto& [k, v] : obj.items()) {
      if (k != "doc") keys.insert(k);
    }
    if (keys != expected) {
      result.warnings.push_back(where + ": arity mismatch (expected " + std::to_string(expected.size()) +
                                " slots, got " + std::to_string(keys.size()) + ")");
      continue;
    }

    StudyTuple tuple;
    tuple.query_id = query.id;
    if (regime == Regime::kPerPaper) {
      tuple.doc_id = doc_id.value_or(0);
    } else {
      if (!obj.contains("doc")) {
        result.warnings.push_back(where + ": missing doc marker");
        continue;
      }
      auto marker = parse_doc_marker(obj["doc"]);
      if (!marker) {
        result.warnings.push_back(where + ": invalid doc marker " + obj["doc"].dump().substr(0, 40));
        continue;
      }
      if (!corpus_ids.contains(*marker)) {
        result.warnings.push_back(where + ": doc marker [" + std::to_string(*marker) + "] out of range");
        continue;
      }
      tuple.doc_id = *marker;
    }

    bool ok = true;
    for (Slot slot : posed.slots) {
      auto value = parse_slot_value(slot, obj[std::string(slot_name(slot))]);
      if (!value) {
        result.warnings.push_back(where + ": slot " + std::string(slot_name(slot)) + " has an unusable value");
        ok = false;
        break;
      }
      tuple.fields.push_back({slot, std::move(*value)});
    }
    if (ok) result.tuples.push_back(std::move(tuple));
  }
  if (regime == Regime::kPerPaper && doc_id && !corpus_ids.empty() && !corpus_ids.contains(*doc_id)) {
    result.warnings.push_back("per-paper doc id " + std::to_string(*doc_id) + " is not in the corpus");
    result.tuples.clear();
  }
  return result;
}

std::string serialize_tuples(const std::vector<StudyTuple>& tuples, bool with_doc) {
  std::string out;
  for (const auto& t : tuples) {
    out += tuple_to_json(t, with_doc).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::string render_aggregation_prompt(std::vector<std::pair<DocId, std::string>> per_doc_outputs,
                                      const QuerySpec& query, const InstructionHeader& header) {
  if (query.scoring() != ScoringKind::kCorpusScalar) {
    throw InputError("aggregation applies only to corpus-level queries, not " + query.id);
  }
  std::sort(per_doc_outputs.begin(), per_doc_outputs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string p = header.text;
  if (!p.empty() && p.back() != '\n') p += '\n';
  p += '\n';
  p += kAggregationMarker;
  p += "\nThe outputs below were extracted from each document separately. Combine them to answer the query.\n";
  for (const auto& [doc, output] : per_doc_outputs) {
    p += "\n=== OUTPUT [" + std::to_string(doc) + "] ===\n";
    p += output;
    if (output.empty() || output.back() != '\n') p += '\n';
  }
  p += "\n=== QUERY ===\n";
  p += query.text;
  p += "\n\n=== OUTPUT FORMAT ===\n";
  p += output_contract(query);
  return p;
}

AggregationResult aggregate_per_paper(std::vector<std::pair<DocId, std::string>> per_doc_outputs,
                                      const QuerySpec& query, Gateway& gateway, const std::string& model,
                                      const InstructionHeader& header) {
  CompletionRequest request;
  request.model = model;
  request.prompt = render_aggregation_prompt(std::move(per_doc_outputs), query, header);
  auto completion = gateway.complete(request);
  return {completion.key, completion.text};
}

}  // namespace evidx
