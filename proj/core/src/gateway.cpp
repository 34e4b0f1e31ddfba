#include "evidx/gateway.hpp"

#include <cstdlib>
#include <ctime>
#include <thread>

#include "evidx/error.hpp"

namespace evidx {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

}  // namespace

ReplayMissError::ReplayMissError(std::vector<std::string> keys)
    : BackendError([&] {
        std::string msg = "replay cache miss (prompt bytes changed or cache incomplete) for "
                          + std::to_string(keys.size()) + " key(s):";
        for (const auto& k : keys) msg += "\n  " + k;
        return msg;
      }()),
      keys_(std::move(keys)) {}

LiveConfig LiveConfig::from_env() {
  LiveConfig config;
  config.api_base = env_or_empty("EVIDX_API_BASE");
  config.api_key = env_or_empty("EVIDX_API_KEY");
  return config;
}

Gateway::Gateway(GatewayConfig config) : config_(std::move(config)) {
  if (config_.backend == BackendKind::kReplay && !config_.cache) {
    throw InputError("replay backend requires a cache directory");
  }
  if (config_.backend == BackendKind::kMock && !config_.mock) {
    throw InputError("mock backend requires a responder");
  }
  if (config_.backend == BackendKind::kLive) {
    if (config_.live.api_base.empty()) throw InputError("live backend requires EVIDX_API_BASE");
    if (!config_.transport) config_.transport = make_http_transport();
  }
  if (!config_.live.sleep) {
    config_.live.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

Gateway::Completion Gateway::complete(const CompletionRequest& request) {
  const std::string key = request_key(request);
  std::promise<std::string> promise;
  std::shared_future<std::string> future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    ++stats_.requests;
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      ++stats_.memo_hits;
      future = it->second;
    } else {
      future = promise.get_future().share();
      memo_.emplace(key, future);
      owner = true;
    }
  }
  if (owner) {
    try {
      promise.set_value(dispatch(request, key));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      memo_.erase(key);
    }
  }
  return {key, future.get()};
}

std::string Gateway::dispatch(const CompletionRequest& request, const std::string& key) {
  if (config_.cache) {
    if (auto hit = config_.cache->get(key)) {
      std::lock_guard lock(mutex_);
      ++stats_.cache_hits;
      return hit->response;
    }
  }
  if (config_.backend == BackendKind::kReplay) throw ReplayMissError({key});

  {
    std::lock_guard lock(mutex_);
    ++stats_.backend_calls;
  }
  std::string text = config_.backend == BackendKind::kLive ? call_live(request) : config_.mock(request);

  if (config_.cache) {
    CompletionRecord record;
    record.key = key;
    record.response = text;
    record.timestamp = utc_timestamp();
    record.backend = config_.backend;
    record.request = nlohmann::json::parse(canonical_request(request));
    config_.cache->put(record);
  }
  return text;
}

std::string Gateway::call_live(const CompletionRequest& request) {
  nlohmann::json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
  const std::string payload = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  std::string url = config_.live.api_base;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.live.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.live.api_key);

  std::string last_error;
  auto backoff = config_.live.initial_backoff;
  for (int attempt = 1; attempt <= config_.live.max_attempts; ++attempt) {
    {
      std::lock_guard lock(mutex_);
      ++stats_.network_calls;
    }
    HttpResponse response = config_.transport->post(url, headers, payload);
    if (response.status == 200) {
      try {
        auto j = nlohmann::json::parse(response.body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed completion body: ") + e.what();
      }
    } else if (response.status == 0) {
      last_error = "transport error: " + response.error;
    } else {
      last_error = "HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200);
    }
    if (attempt < config_.live.max_attempts) {
      config_.live.sleep(backoff);
      backoff *= 2;
    }
  }
  throw BackendError("live completion failed after " + std::to_string(config_.live.max_attempts) +
                     " attempts: " + last_error);
}

GatewayStats Gateway::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::string complete(Gateway& gateway, const CompletionRequest& request) { return gateway.complete(request).text; }

}  // namespace evidx
