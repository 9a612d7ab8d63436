#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "planrl/core/hash.hpp"
#include "planrl/judge/prompts.hpp"
#include "planrl/judge/verdict.hpp"

namespace planrl::judge {

struct JudgeRequest {
  Rubric rubric = Rubric::Adherence;
  std::string filled_prompt;
  int max_retries = 2;
  double timeout_seconds = 30.0;
};

class Backend {
public:
  virtual ~Backend() = default;
  // one chat completion round; `prompt` already carries any retry addendum
  virtual std::string complete(const JudgeRequest& req, const std::string& prompt) = 0;
};

// --- deterministic mock ------------------------------------------------

// Scripted replies for tests and offline runs. Lookup order: exact key
// "<rubric>|<prompt hash>", then rubric-wide key "<rubric>", then the
// default reply. Every request is recorded for assertions.
class MockBackend final : public Backend {
public:
  static std::string key_for(Rubric r, const std::string& filled_prompt) {
    return rubric_name(r) + "|" + hex64(fnv1a64(filled_prompt));
  }

  void script(const std::string& key, std::string reply) { script_[key] = std::move(reply); }
  void script_rubric(Rubric r, std::string reply) { script_[rubric_name(r)] = std::move(reply); }
  void set_default(std::string reply) { default_ = std::move(reply); }

  std::string complete(const JudgeRequest& req, const std::string& prompt) override {
    std::lock_guard<std::mutex> lk(mu_);
    log_.emplace_back(rubric_name(req.rubric), prompt);
    auto exact = script_.find(key_for(req.rubric, req.filled_prompt));
    if (exact != script_.end()) return exact->second;
    auto wide = script_.find(rubric_name(req.rubric));
    if (wide != script_.end()) return wide->second;
    if (default_) return *default_;
    raise(ErrorKind::Usage, "mock backend: no scripted reply for rubric " + rubric_name(req.rubric));
  }

  std::vector<std::pair<std::string, std::string>> request_log() const {
    std::lock_guard<std::mutex> lk(mu_);
    return log_;
  }

private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> script_;
  std::optional<std::string> default_;
  std::vector<std::pair<std::string, std::string>> log_;
};

// --- chat-completions HTTP client ---------------------------------------

struct HttpBackendConfig {
  std::string url;  // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string model = "judge";
  double temperature = 0.0;
  std::string token_env = "PLANRL_JUDGE_TOKEN";
  int transport_retries = 3;
  double backoff_seconds = 0.5;  // doubles per retry
  std::string debug_log_path;    // request/response bodies, token redacted
};

class HttpBackend final : public Backend {
public:
  explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    std::string rest = cfg_.url;
    if (rest.rfind("http://", 0) == 0) {
      rest = rest.substr(7);
    } else {
      raise(ErrorKind::Usage, "judge backend url must start with http:// : " + cfg_.url);
    }
    size_t slash = rest.find('/');
    host_port_ = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  }

  std::string complete(const JudgeRequest& req, const std::string& prompt) override {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    std::string payload = body.dump();

    const char* token = cfg_.token_env.empty() ? nullptr : std::getenv(cfg_.token_env.c_str());
    double backoff = cfg_.backoff_seconds;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff *= 2;
      }
      httplib::Client client(host_port_);
      client.set_connection_timeout(std::chrono::duration<double>(req.timeout_seconds));
      client.set_read_timeout(std::chrono::duration<double>(req.timeout_seconds));
      httplib::Headers headers;
      if (token) headers.emplace("Authorization", std::string("Bearer ") + token);
      debug_log("request", payload);
      auto res = client.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      debug_log("response", res->body);
      if (res->status >= 500) {
        last_error = "server error: status " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        raise(ErrorKind::JudgeUnavailable, "judge backend returned status " + std::to_string(res->status));
      nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
        raise(ErrorKind::JudgeUnavailable, "judge backend reply is not a chat completion");
      return reply["choices"][0]["message"]["content"].get<std::string>();
    }
    raise(ErrorKind::JudgeUnavailable, "judge backend unreachable: " + last_error);
  }

private:
  void debug_log(const char* kind, const std::string& body) {
    if (cfg_.debug_log_path.empty()) return;
    std::lock_guard<std::mutex> lk(log_mu_);
    std::ofstream out(cfg_.debug_log_path, std::ios::app);
    out << kind << " " << body << "\n";  // bearer token never enters the body
  }

  HttpBackendConfig cfg_;
  std::string host_port_;
  std::string path_;
  std::mutex log_mu_;
};

// --- client: retries, range guard, cache, bounded concurrency -----------

class JudgeClient {
public:
  explicit JudgeClient(std::shared_ptr<Backend> backend, int max_inflight = 8)
      : backend_(std::move(backend)), slots_(max_inflight) {}

  // Sends the request, parses the verdict, retries on parse/range failures
  // with the parse error appended to the prompt. Cached on the filled prompt.
  JudgeVerdict query(const JudgeRequest& req) {
    std::string cache_key = rubric_name(req.rubric) + "|" + req.filled_prompt;
    {
      std::lock_guard<std::mutex> lk(cache_mu_);
      auto hit = cache_.find(cache_key);
      if (hit != cache_.end()) return hit->second;
    }
    Slot slot(*this);
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt <= req.max_retries; ++attempt) {
      std::string prompt = req.filled_prompt;
      if (attempt > 0)
        prompt += "\n\n# Previous Reply Problem\nYour previous reply could not be used (" +
                  last_error + "). Answer again following the Output Format exactly.";
      std::string raw = backend_->complete(req, prompt);
      std::string error;
      auto verdict = parse_verdict(req.rubric, raw, error);
      if (verdict) {
        std::lock_guard<std::mutex> lk(cache_mu_);
        if (cache_.size() < max_cache_entries_) cache_.emplace(cache_key, *verdict);
        return *verdict;
      }
      last_error = error;
    }
    raise(ErrorKind::JudgeUnavailable,
          "judge gave no usable verdict after " + std::to_string(req.max_retries + 1) +
              " attempts: " + last_error);
  }

  size_t cache_size() const {
    std::lock_guard<std::mutex> lk(cache_mu_);
    return cache_.size();
  }

private:
  // counting semaphore over backend calls
  struct Slot {
    explicit Slot(JudgeClient& c) : client(c) {
      std::unique_lock<std::mutex> lk(client.sem_mu_);
      client.sem_cv_.wait(lk, [&] { return client.slots_ > 0; });
      --client.slots_;
    }
    ~Slot() {
      {
        std::lock_guard<std::mutex> lk(client.sem_mu_);
        ++client.slots_;
      }
      client.sem_cv_.notify_one();
    }
    JudgeClient& client;
  };

  std::shared_ptr<Backend> backend_;
  mutable std::mutex cache_mu_;
  std::map<std::string, JudgeVerdict> cache_;
  size_t max_cache_entries_ = 4096;
  std::mutex sem_mu_;
  std::condition_variable sem_cv_;
  int slots_;
};

}  // namespace planrl::judge
