#include "planbench/vlm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "planbench/digest.hpp"
#include "planbench/error.hpp"
#include "planbench/plan_language.hpp"

namespace planbench {

namespace fs = std::filesystem;

void ChatRequest::validate() const {
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].role == "system" && i != 0) {
      throw Error(ErrorKind::config_error, "system message must come first and only once");
    }
  }
}

json wire_json(const ChatRequest& req) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    json content = json::array();
    for (const auto& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        content.push_back({{"type", "text"}, {"text", t->text}});
      } else {
        const auto& img = std::get<ImagePart>(part);
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:image/png;base64," + base64_encode(img.png)}}}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  return {{"model", req.model},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"messages", messages}};
}

json canonical_request_json(const ChatRequest& req) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    json content = json::array();
    for (const auto& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        content.push_back({{"type", "text"}, {"text", t->text}});
      } else {
        content.push_back({{"type", "image"}, {"sha256", sha256_hex(std::get<ImagePart>(part).png)}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  return {{"model", req.model},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"messages", messages}};
}

std::string cache_key(const ChatRequest& req) { return sha256_hex(canonical_request_json(req).dump()); }

std::string response_text(const json& raw) {
  try {
    const json& content = raw.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    if (content.is_null()) return "";
    std::string out;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") out += part.value("text", "");
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::transport_error, std::string("malformed completion body: ") + e.what());
  }
}

TokenBucket::TokenBucket(double per_minute, double burst)
    : rate_per_second_(per_minute / 60.0),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_per_second_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<json> ResponseCache::load(const std::string& key) const {
  std::ifstream in(dir_ / key);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const json& raw) const {
  fs::create_directories(dir_);
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = dir_ / (key + suffix.str());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << raw.dump();
    if (!out) throw Error(ErrorKind::transport_error, "cannot write cache file " + tmp.string());
  }
  fs::rename(tmp, dir_ / key);
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::config_error, "endpoint needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

double retry_after(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return 1.0;
  try {
    return std::stod(res.get_header_value("Retry-After"));
  } catch (const std::exception&) {
    return 1.0;
  }
}

}  // namespace

LiveBackend::LiveBackend(LiveConfig config, std::shared_ptr<TokenBucket> limiter)
    : config_(std::move(config)), cache_(config_.cache_dir), limiter_(std::move(limiter)) {
  if (config_.api_key.empty()) throw Error(ErrorKind::config_error, "live backend needs an API key");
  if (config_.endpoint.empty()) throw Error(ErrorKind::config_error, "live backend needs an endpoint");
  if (!limiter_) limiter_ = std::make_shared<TokenBucket>(config_.requests_per_minute, 1.0);
}

std::string LiveBackend::complete(const ChatRequest& request) {
  ChatRequest req = request;
  if (!config_.model.empty()) req.model = config_.model;
  req.validate();
  const std::string key = cache_key(req);
  if (const auto cached = cache_.load(key)) return response_text(*cached);

  const Endpoint ep = split_endpoint(config_.endpoint);
  const std::string body = wire_json(req).dump();
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(config_.backoff_seconds * static_cast<double>(1 << (attempt - 1))));
    }
    limiter_->acquire();
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_bearer_token_auth(config_.api_key);
    ++network_calls_;
    const auto res = client.Post(ep.path + "/chat/completions", body, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429) {
      throw RateLimitedError("HTTP 429 from " + config_.endpoint, retry_after(*res));
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::transport_error, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    json raw;
    try {
      raw = json::parse(res->body);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::transport_error, std::string("response is not JSON: ") + e.what());
    }
    std::string text = response_text(raw);
    cache_.store(key, raw);
    return text;
  }
  throw Error(ErrorKind::transport_error,
              "giving up after " + std::to_string(config_.max_retries) + " retries: " + last_error);
}

ReplayCacheBackend::ReplayCacheBackend(fs::path dir) : cache_(std::move(dir)) {}

std::string ReplayCacheBackend::complete(const ChatRequest& req) {
  req.validate();
  const std::string key = cache_key(req);
  const auto cached = cache_.load(key);
  if (!cached) throw Error(ErrorKind::cache_miss, key + " not in " + cache_.dir().string());
  return response_text(*cached);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, bool repeat_last)
    : responses_(std::move(responses)), repeat_last_(repeat_last) {}

std::string ScriptedBackend::complete(const ChatRequest& req) {
  req.validate();
  std::lock_guard lock(mu_);
  if (next_ < responses_.size()) return responses_[next_++];
  if (repeat_last_ && !responses_.empty()) return responses_.back();
  throw Error(ErrorKind::script_exhausted, "after " + std::to_string(responses_.size()) + " responses");
}

Scene belief_scene(const Scene& truth, const GoalSpec& goal) {
  const ObjectTable& table = truth.table();
  const std::vector<bool> visible = visibility_mask(table, truth.state());
  std::optional<std::size_t> guess;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.is_container(i) && visible[i] && !truth.is_open(i)) {
      guess = i;
      break;
    }
  }
  if (!guess) return truth;
  SceneState state = truth.state();
  for (const auto& id : goal.predicate.referenced_ids()) {
    const std::size_t i = table.index_of(id);
    if (!visible[i]) state.set_support(i, Support{RelationKind::in, *guess});
  }
  if (!validate(table, state).empty()) return truth;
  return truth.with_state(state);
}

std::string oracle_response(const SimAttachment& sim) {
  const Scene belief = belief_scene(sim.scene, sim.goal);
  std::ostringstream out;
  out << "Objects: ";
  const auto visible = visibility_mask(sim.scene.table(), sim.scene.state());
  bool first = true;
  for (std::size_t i = 0; i < sim.scene.size(); ++i) {
    if (!visible[i]) continue;
    out << (first ? "" : ", ") << sim.scene.table().phrase(i);
    first = false;
  }
  if (first) out << "none";
  out << "\n";
  const auto plan = sim.memo ? sim.memo->solve(belief, sim.goal) : oracle_solve(belief, sim.goal);
  if (!plan) {
    out << "No sequence of the available skills reaches the goal from here.\n";
    return out.str();
  }
  out << "Plan:\n" << format_plan(*plan, belief.table());
  return out.str();
}

std::string OracleBackend::complete(const ChatRequest& req) {
  req.validate();
  if (!req.attachment) throw Error(ErrorKind::config_error, "oracle backend needs a simulator attachment");
  return oracle_response(*req.attachment);
}

void load_script(const fs::path& path, BackendSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot read script " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, "script is not JSON: " + std::string(e.what()));
  }
  if (j.is_array()) {
    spec.script = j.get<std::vector<std::string>>();
  } else {
    spec.script = j.at("responses").get<std::vector<std::string>>();
    spec.script_repeat_last = j.value("repeat_last", spec.script_repeat_last);
  }
}

BackendFactory::BackendFactory(BackendSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind == "live") {
    const char* key = std::getenv("PLANBENCH_API_KEY");
    LiveConfig cfg;
    cfg.endpoint = spec_.endpoint;
    cfg.model = spec_.model;
    cfg.api_key = key ? key : "";
    cfg.cache_dir = spec_.cache_dir;
    cfg.requests_per_minute = spec_.requests_per_minute;
    shared_ = std::make_shared<LiveBackend>(cfg);
  } else if (spec_.kind == "replay") {
    shared_ = std::make_shared<ReplayCacheBackend>(spec_.cache_dir);
  } else if (spec_.kind == "oracle") {
    shared_ = std::make_shared<OracleBackend>();
  } else if (spec_.kind != "scripted") {
    throw Error(ErrorKind::config_error, "unknown backend " + spec_.kind);
  }
}

std::shared_ptr<Backend> BackendFactory::for_episode() const {
  if (spec_.kind == "scripted") return std::make_shared<ScriptedBackend>(spec_.script, spec_.script_repeat_last);
  return shared_;
}

}  // namespace planbench
