#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planbench/goal.hpp"
#include "planbench/oracle.hpp"
#include "planbench/scene.hpp"

namespace planbench {

struct TextPart {
  std::string text;
};

struct ImagePart {
  std::vector<std::uint8_t> png;
};

using ContentPart = std::variant<TextPart, ImagePart>;

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::vector<ContentPart> parts;
};

/// Ground truth handed to the oracle-backed mock. Never serialized and never
/// part of the cache key.
struct SimAttachment {
  Scene scene;
  GoalSpec goal;
  std::shared_ptr<OracleMemo> memo;
};

struct ChatRequest {
  std::string model = "mock";
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::shared_ptr<const SimAttachment> attachment;

  /// Throws Error(config_error) unless there is at most one system message
  /// and it comes first.
  void validate() const;
};

/// Chat-completions request body with images as base64 data URIs.
json wire_json(const ChatRequest& req);
/// Request with each image replaced by its SHA-256; keys sorted.
json canonical_request_json(const ChatRequest& req);
/// SHA-256 hex of the canonical request JSON.
std::string cache_key(const ChatRequest& req);

/// Text of choices[0].message.content; content given as parts is concatenated.
/// Throws Error(transport_error) on a malformed body.
std::string response_text(const json& raw);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
  virtual std::string name() const = 0;
  /// Whether observations should carry rendered images for this backend.
  virtual bool wants_images() const { return true; }
};

/// Admission control shared by every live request: refills `per_minute`
/// tokens per minute up to `burst`.
class TokenBucket {
 public:
  TokenBucket(double per_minute, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_per_second_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// One file per key holding the raw response JSON.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<json> load(const std::string& key) const;
  /// Written to a temporary file and renamed into place.
  void store(const std::string& key, const json& raw) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct LiveConfig {
  std::string endpoint;  // e.g. https://api.example.com/v1
  std::string model;
  std::string api_key;
  std::filesystem::path cache_dir;
  int max_retries = 3;
  double backoff_seconds = 0.5;
  double requests_per_minute = 60.0;
  double timeout_seconds = 120.0;
};

class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config, std::shared_ptr<TokenBucket> limiter = nullptr);
  /// Reads the cache first; on a miss posts with retries on transport errors
  /// and 5xx, raises RateLimitedError on 429, then stores the response.
  std::string complete(const ChatRequest& req) override;
  std::string name() const override { return "live"; }

  std::size_t network_calls() const { return network_calls_.load(); }

 private:
  LiveConfig config_;
  ResponseCache cache_;
  std::shared_ptr<TokenBucket> limiter_;
  std::atomic<std::size_t> network_calls_{0};
};

/// Serves only what a live run stored; a miss raises Error(cache_miss).
class ReplayCacheBackend : public Backend {
 public:
  explicit ReplayCacheBackend(std::filesystem::path dir);
  std::string complete(const ChatRequest& req) override;
  std::string name() const override { return "replay"; }

 private:
  ResponseCache cache_;
};

/// Returns scripted responses in order. Past the end it raises
/// Error(script_exhausted), or repeats the last one when asked to.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses, bool repeat_last = false);
  std::string complete(const ChatRequest& req) override;
  std::string name() const override { return "scripted"; }
  bool wants_images() const override { return false; }

 private:
  std::mutex mu_;
  std::vector<std::string> responses_;
  bool repeat_last_;
  std::size_t next_ = 0;
};

/// Plans with the oracle on what the agent can see: goal objects out of view
/// are assumed to be in the first closed visible container. Responds with an
/// inventory line, "Plan:", the numbered plan and "done".
class OracleBackend : public Backend {
 public:
  std::string complete(const ChatRequest& req) override;
  std::string name() const override { return "oracle"; }
  bool wants_images() const override { return false; }
};

/// The scene the oracle-backed mock plans on.
Scene belief_scene(const Scene& truth, const GoalSpec& goal);

/// Response text for an attachment, as OracleBackend produces it.
std::string oracle_response(const SimAttachment& sim);

struct BackendSpec {
  std::string kind = "oracle";  // live | replay | scripted | oracle
  std::filesystem::path cache_dir = "cache";
  std::string endpoint;
  std::string model = "mock";
  std::vector<std::string> script;
  bool script_repeat_last = true;
  double requests_per_minute = 60.0;
};

/// Reads a script file: a JSON array of strings, or an object with
/// "responses" and optional "repeat_last".
void load_script(const std::filesystem::path& path, BackendSpec& spec);

/// Creates one backend per episode; live and replay backends are shared,
/// scripted ones restart from the first response.
class BackendFactory {
 public:
  explicit BackendFactory(BackendSpec spec);
  std::shared_ptr<Backend> for_episode() const;
  const BackendSpec& spec() const { return spec_; }

 private:
  BackendSpec spec_;
  std::shared_ptr<Backend> shared_;
};

}  // namespace planbench
