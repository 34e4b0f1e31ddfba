#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace evidx {

struct CompletionRequest {
  std::string model;
  double temperature = 0.1;
  std::string prompt;
  std::optional<int> max_tokens;
};

/// Sorted keys, UTF-8, no insignificant whitespace.
std::string canonical_request(const CompletionRequest& request);

/// SHA-256 (hex) of canonical_request().
std::string request_key(const CompletionRequest& request);

std::string sha256_hex(std::string_view data);

enum class BackendKind { kLive, kReplay, kMock };

std::string_view backend_name(BackendKind kind);
std::optional<BackendKind> backend_from_name(std::string_view name);

struct CompletionRecord {
  std::string key;
  std::string response;
  std::string timestamp;  // ISO-8601 UTC
  BackendKind backend = BackendKind::kLive;
  nlohmann::json request;  // canonical request, kept for auditing
};

nlohmann::json to_json(const CompletionRecord& record);
CompletionRecord completion_record_from_json(const nlohmann::json& j);

/// Append-only store, one file per key at `<root>/<first 2 hex>/<key>.json`.
/// Concurrent readers; writers are serialized and publish via rename.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path root);

  std::optional<CompletionRecord> get(const std::string& key) const;
  bool contains(const std::string& key) const;

  /// Returns false (and leaves the file untouched) if the key already exists.
  bool put(const CompletionRecord& record);

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
};

struct HttpResponse {
  int status = 0;           // 0 when the transport itself failed
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body) = 0;
};

/// cpp-httplib backed transport (http and https).
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(600));

struct LiveConfig {
  std::string api_base;  // e.g. https://host/v1 ; "/chat/completions" is appended
  std::string api_key;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for

  /// Reads EVIDX_API_BASE and EVIDX_API_KEY.
  static LiveConfig from_env();
};

using MockResponder = std::function<std::string(const CompletionRequest&)>;

struct GatewayConfig {
  BackendKind backend = BackendKind::kMock;
  std::shared_ptr<CompletionCache> cache;  // optional for live/mock, required for replay
  LiveConfig live;
  std::shared_ptr<HttpTransport> transport;  // live only; defaults to make_http_transport()
  MockResponder mock;                        // mock only
};

struct GatewayStats {
  std::size_t requests = 0;       // complete() invocations
  std::size_t memo_hits = 0;      // served by an earlier or in-flight call in this process
  std::size_t cache_hits = 0;     // served from the on-disk cache
  std::size_t backend_calls = 0;  // dispatched to the live endpoint or mock
  std::size_t network_calls = 0;  // HTTP attempts, retries included
};

/// Uniform completion interface. Lookup order: in-process memo, cache, then
/// the backend (live or mock) with write-through. Replay never reaches a
/// backend and raises ReplayMissError on a cache miss. Each key is dispatched
/// at most once per process even under concurrent callers.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config);

  struct Completion {
    std::string key;
    std::string text;
  };

  Completion complete(const CompletionRequest& request);

  GatewayStats stats() const;
  BackendKind backend() const { return config_.backend; }
  const CompletionCache* cache() const { return config_.cache.get(); }

 private:
  std::string dispatch(const CompletionRequest& request, const std::string& key);
  std::string call_live(const CompletionRequest& request);

  GatewayConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_future<std::string>> memo_;
  GatewayStats stats_;
};

/// Convenience wrapper returning only the response text.
std::string complete(Gateway& gateway, const CompletionRequest& request);

// ---------------------------------------------------------------------------
// Judge
// ---------------------------------------------------------------------------

struct JudgeContext {
  std::string query_id;
  std::string slot;
};

struct JudgeVerdict {
  bool equivalent = false;
  std::string key;                     // cache key of the judge request
  std::optional<std::string> warning;  // malformed answer, replay miss, ...
};

class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict judge(std::string_view predicted, std::string_view gold, const JudgeContext& context) = 0;
};

/// First line of every judge prompt; lets mocks route judge requests.
inline constexpr std::string_view kJudgePromptMarker = "=== EQUIVALENCE CHECK ===";

std::string render_judge_prompt(std::string_view a, std::string_view b, const JudgeContext& context);

/// First alphabetic token, case-insensitive: yes -> true, no -> false,
/// anything else -> nullopt.
std::optional<bool> parse_judge_answer(std::string_view response);

/// Judge backed by a Gateway, sharing its cache.
class GatewayJudge : public Judge {
 public:
  GatewayJudge(Gateway& gateway, std::string model, double temperature = 0.1);

  /// In replay mode, record missing keys and answer "no" instead of throwing,
  /// so a scoring pass can report every missing key at once.
  void collect_replay_misses(bool enabled) { collect_misses_ = enabled; }

  JudgeVerdict judge(std::string_view predicted, std::string_view gold, const JudgeContext& context) override;

  std::size_t calls() const;
  std::vector<std::string> missing_keys() const;

 private:
  Gateway& gateway_;
  std::string model_;
  double temperature_;
  bool collect_misses_ = false;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
  std::vector<std::string> missing_;
};

JudgeVerdict judge_equivalence(std::string_view a, std::string_view b, const JudgeContext& context,
                               Gateway& gateway, const std::string& model);

}  // namespace evidx
