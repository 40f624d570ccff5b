#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace evobo::llm {

using Millis = std::chrono::milliseconds;

struct LLMParams {
  double temperature = 0.5;
  int top_k = 60;
  std::optional<double> top_p;
  std::string model = "gemini-2.0-flash";
  std::string endpoint;  // full URL of an OpenAI-style chat completions route
  std::string api_key_env = "EVOBO_LLM_API_KEY";
  Millis timeout = std::chrono::seconds(120);
  int max_retries = 3;
  Millis initial_backoff = std::chrono::seconds(2);
  double backoff_factor = 2.0;
  Millis min_request_interval{0};  // global rate limit
  int parallelism = 1;

  void validate() const;
  nlohmann::json sampling_json() const;
};

void to_json(nlohmann::json& j, const LLMParams& p);
void from_json(const nlohmann::json& j, LLMParams& p);

struct BackendReply {
  enum class Kind { Ok, Transient, Fatal };
  Kind kind = Kind::Ok;
  std::string text;   // completion on Ok, diagnostic otherwise
  int http_status = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendReply complete(const std::string& prompt, const LLMParams& params) = 0;
};

/// Offline backend replaying a fixed script. Thread-safe.
class ScriptedBackend final : public Backend {
 public:
  struct Step {
    BackendReply::Kind kind = BackendReply::Kind::Ok;
    std::string text;
  };

  /// Every response succeeds. With `cycle`, the script restarts when exhausted;
  /// otherwise further calls fail fatally.
  explicit ScriptedBackend(std::vector<std::string> responses, bool cycle = false);
  explicit ScriptedBackend(std::vector<Step> steps, bool cycle = false);

  BackendReply complete(const std::string& prompt, const LLMParams& params) override;

  std::size_t calls() const;
  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mu_;
  std::vector<Step> steps_;
  bool cycle_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
};

/// Offline backend choosing a response from a fixed list by prompt hash, so
/// the same prompt always gets the same answer regardless of call order.
class HashedBackend final : public Backend {
 public:
  explicit HashedBackend(std::vector<std::string> responses);
  BackendReply complete(const std::string& prompt, const LLMParams& params) override;

 private:
  std::vector<std::string> responses_;
};

/// Chat-completions over HTTP(S). The API key, if any, is read from the
/// environment variable named in the params.
class HttpBackend final : public Backend {
 public:
  BackendReply complete(const std::string& prompt, const LLMParams& params) override;

  static nlohmann::json request_body(const std::string& prompt, const LLMParams& params);
  /// Extracts choices[0].message.content; throws Error on an unexpected shape.
  static std::string extract_content(const nlohmann::json& response);
};

/// Spaces requests at least `interval` apart across all threads.
class RateLimiter {
 public:
  explicit RateLimiter(Millis interval) : interval_(interval) {}
  void acquire();

 private:
  std::mutex mu_;
  Millis interval_;
  std::chrono::steady_clock::time_point next_{};
};

/// Append-only JSONL transcript, one record per attempt, flushed per write.
class TranscriptLog {
 public:
  explicit TranscriptLog(std::filesystem::path path);
  void append(const nlohmann::json& record);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::mutex mu_;
  std::filesystem::path path_;
  std::ofstream os_;
};

std::string prompt_hash(const std::string& prompt);

struct Failure {
  std::string message;
};

using Outcome = std::variant<std::string, Failure>;

class Client {
 public:
  using Sleeper = std::function<void(Millis)>;

  Client(std::shared_ptr<Backend> backend, LLMParams params,
         std::shared_ptr<TranscriptLog> transcript = nullptr, Sleeper sleeper = {});

  /// Raw completion. Transient failures are retried with exponential backoff;
  /// throws LLMUnavailable once retries are exhausted or on a fatal reply.
  std::string generate(const std::string& prompt);

  /// Independent outcomes in prompt order. Throws EmptyBatch.
  std::vector<Outcome> generate_batch(const std::vector<std::string>& prompts);

  const LLMParams& params() const noexcept { return params_; }

 private:
  std::shared_ptr<Backend> backend_;
  LLMParams params_;
  std::shared_ptr<TranscriptLog> transcript_;
  Sleeper sleeper_;
  RateLimiter limiter_;
};

}  // namespace evobo::llm
