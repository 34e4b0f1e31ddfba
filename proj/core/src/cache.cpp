#include <iomanip>

#include <openssl/evp.h>

#include "evidx/error.hpp"
#include "evidx/fs_util.hpp"
#include "evidx/gateway.hpp"

namespace evidx {
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string canonical_request(const CompletionRequest& request) {
  nlohmann::json j;  // std::map-backed: keys come out sorted
  j["model"] = request.model;
  j["temperature"] = request.temperature;
  j["prompt"] = request.prompt;
  j["max_tokens"] = request.max_tokens ? nlohmann::json(*request.max_tokens) : nlohmann::json(nullptr);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string request_key(const CompletionRequest& request) { return sha256_hex(canonical_request(request)); }

std::string_view backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kLive: return "live";
    case BackendKind::kReplay: return "replay";
    case BackendKind::kMock: return "mock";
  }
  return "?";
}

std::optional<BackendKind> backend_from_name(std::string_view name) {
  if (name == "live") return BackendKind::kLive;
  if (name == "replay") return BackendKind::kReplay;
  if (name == "mock") return BackendKind::kMock;
  return std::nullopt;
}

nlohmann::json to_json(const CompletionRecord& record) {
  return {{"key", record.key},
          {"response", record.response},
          {"timestamp", record.timestamp},
          {"backend", backend_name(record.backend)},
          {"request", record.request}};
}

CompletionRecord completion_record_from_json(const nlohmann::json& j) {
  CompletionRecord r;
  try {
    r.key = j.at("key").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.timestamp = j.value("timestamp", "");
    auto kind = backend_from_name(j.value("backend", "live"));
    if (!kind) throw InputError("unknown backend in cache record " + r.key);
    r.backend = *kind;
    r.request = j.value("request", nlohmann::json());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed cache record: ") + e.what());
  }
  return r;
}

CompletionCache::CompletionCache(fs::path root) : root_(std::move(root)) {}

fs::path CompletionCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

bool CompletionCache::contains(const std::string& key) const {
  std::shared_lock lock(mutex_);
  return fs::exists(path_for(key));
}

std::optional<CompletionRecord> CompletionCache::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const fs::path path = path_for(key);
  if (!fs::exists(path)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("corrupt cache record " + path.string() + ": " + e.what());
  }
  CompletionRecord record = completion_record_from_json(j);
  if (record.key != key) throw InputError("cache record " + path.string() + " carries key " + record.key);
  return record;
}

bool CompletionCache::put(const CompletionRecord& record) {
  std::unique_lock lock(mutex_);
  const fs::path path = path_for(record.key);
  if (fs::exists(path)) return false;
  write_file_atomic(path, to_json(record).dump(2) + "\n");
  return true;
}

}  // namespace evidx
