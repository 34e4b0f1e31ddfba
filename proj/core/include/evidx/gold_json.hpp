#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evidx/schema.hpp"

namespace evidx {

/// One gold annotation file: {"domain": ..., "documents": [GoldRecord...]}.
struct GoldFile {
  std::string domain;
  std::vector<GoldRecord> documents;
};

/// Throws InputError on malformed JSON or wrong field types. Schema-level
/// problems (ranges, roles, duplicates) are left to validate_gold_set.
GoldFile parse_gold_json(std::string_view text);
GoldFile load_gold_file(const std::filesystem::path& path);

nlohmann::json to_json(const GoldRecord& record);
nlohmann::json to_json(const GoldFile& file);

}  // namespace evidx
