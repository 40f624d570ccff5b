#include "evobo/llm.hpp"

#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "evobo/errors.hpp"

namespace evobo::llm {

using nlohmann::json;

void LLMParams::validate() const {
  if (temperature < 0.0) throw InvalidConfig("temperature must be >= 0");
  if (top_k < 1) throw InvalidConfig("top_k must be >= 1");
  if (top_p && (*top_p <= 0.0 || *top_p > 1.0)) throw InvalidConfig("top_p must be in (0, 1]");
  if (max_retries < 0) throw InvalidConfig("max_retries must be >= 0");
  if (parallelism < 1) throw InvalidConfig("parallelism must be >= 1");
}

json LLMParams::sampling_json() const {
  json j = {{"model", model}, {"temperature", temperature}, {"top_k", top_k}};
  if (top_p) j["top_p"] = *top_p;
  return j;
}

void to_json(json& j, const LLMParams& p) {
  j = {{"temperature", p.temperature},
       {"top_k", p.top_k},
       {"top_p", p.top_p ? json(*p.top_p) : json()},
       {"model", p.model},
       {"endpoint", p.endpoint},
       {"api_key_env", p.api_key_env},
       {"timeout_ms", p.timeout.count()},
       {"max_retries", p.max_retries},
       {"initial_backoff_ms", p.initial_backoff.count()},
       {"backoff_factor", p.backoff_factor},
       {"min_request_interval_ms", p.min_request_interval.count()},
       {"parallelism", p.parallelism}};
}

void from_json(const json& j, LLMParams& p) {
  LLMParams d;
  p.temperature = j.value("temperature", d.temperature);
  p.top_k = j.value("top_k", d.top_k);
  if (j.contains("top_p") && !j.at("top_p").is_null()) p.top_p = j.at("top_p").get<double>();
  p.model = j.value("model", d.model);
  p.endpoint = j.value("endpoint", d.endpoint);
  p.api_key_env = j.value("api_key_env", d.api_key_env);
  p.timeout = Millis(j.value("timeout_ms", static_cast<long long>(d.timeout.count())));
  p.max_retries = j.value("max_retries", d.max_retries);
  p.initial_backoff = Millis(j.value("initial_backoff_ms", static_cast<long long>(d.initial_backoff.count())));
  p.backoff_factor = j.value("backoff_factor", d.backoff_factor);
  p.min_request_interval =
      Millis(j.value("min_request_interval_ms", static_cast<long long>(d.min_request_interval.count())));
  p.parallelism = j.value("parallelism", d.parallelism);
}

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, bool cycle) : cycle_(cycle) {
  for (auto& r : responses) steps_.push_back({BackendReply::Kind::Ok, std::move(r)});
}

ScriptedBackend::ScriptedBackend(std::vector<Step> steps, bool cycle) : steps_(std::move(steps)), cycle_(cycle) {}

BackendReply ScriptedBackend::complete(const std::string& prompt, const LLMParams&) {
  std::lock_guard lock(mu_);
  prompts_.push_back(prompt);
  if (steps_.empty() || (!cycle_ && next_ >= steps_.size()))
    return {BackendReply::Kind::Fatal, "script exhausted", 0};
  const Step& step = steps_[next_ % steps_.size()];
  ++next_;
  return {step.kind, step.text, step.kind == BackendReply::Kind::Ok ? 200 : 429};
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return prompts_.size();
}

std::vector<std::string> ScriptedBackend::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

HashedBackend::HashedBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {
  if (responses_.empty()) throw InvalidConfig("hashed backend needs at least one response");
}

BackendReply HashedBackend::complete(const std::string& prompt, const LLMParams&) {
  const auto h = std::stoull(prompt_hash(prompt), nullptr, 16);
  return {BackendReply::Kind::Ok, responses_[h % responses_.size()], 200};
}

// ---------------------------------------------------------------------------

json HttpBackend::request_body(const std::string& prompt, const LLMParams& params) {
  json body = {{"model", params.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", params.temperature},
               {"top_k", params.top_k}};
  if (params.top_p) body["top_p"] = *params.top_p;
  return body;
}

std::string HttpBackend::extract_content(const json& response) {
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("unexpected completion shape: ") + e.what());
  }
}

BackendReply HttpBackend::complete(const std::string& prompt, const LLMParams& params) {
  if (params.endpoint.empty()) return {BackendReply::Kind::Fatal, "no endpoint configured", 0};

  // Split "scheme://host[:port]/path".
  const auto scheme_end = params.endpoint.find("://");
  const auto path_start =
      params.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base = params.endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : params.endpoint.substr(path_start);

  httplib::Client cli(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(params.timeout).count();
  cli.set_connection_timeout(static_cast<time_t>(std::max<long long>(1, secs)), 0);
  cli.set_read_timeout(static_cast<time_t>(std::max<long long>(1, secs)), 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(params.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = cli.Post(path, headers, request_body(prompt, params).dump(), "application/json");
  if (!res) return {BackendReply::Kind::Transient, "request failed: " + httplib::to_string(res.error()), 0};

  const int status = res->status;
  if (status == 429 || status == 408 || status >= 500)
    return {BackendReply::Kind::Transient, "HTTP " + std::to_string(status) + ": " + res->body, status};
  if (status < 200 || status >= 300)
    return {BackendReply::Kind::Fatal, "HTTP " + std::to_string(status) + ": " + res->body, status};
  try {
    return {BackendReply::Kind::Ok, extract_content(json::parse(res->body)), status};
  } catch (const std::exception& e) {
    return {BackendReply::Kind::Fatal, e.what(), status};
  }
}

// ---------------------------------------------------------------------------

void RateLimiter::acquire() {
  if (interval_.count() <= 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

TranscriptLog::TranscriptLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  os_.open(path_, std::ios::app);
  if (!os_) throw Error("cannot open transcript log " + path_.string());
}

void TranscriptLog::append(const json& record) {
  std::lock_guard lock(mu_);
  os_ << record.dump() << '\n';
  os_.flush();
  if (!os_) throw Error("failed writing transcript log " + path_.string());
}

std::string prompt_hash(const std::string& prompt) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Client::Client(std::shared_ptr<Backend> backend, LLMParams params, std::shared_ptr<TranscriptLog> transcript,
               Sleeper sleeper)
    : backend_(std::move(backend)),
      params_(std::move(params)),
      transcript_(std::move(transcript)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](Millis d) { std::this_thread::sleep_for(d); })),
      limiter_(params_.min_request_interval) {
  params_.validate();
  if (!backend_) throw InvalidConfig("llm client needs a backend");
}

std::string Client::generate(const std::string& prompt) {
  Millis backoff = params_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= params_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff = Millis(static_cast<long long>(static_cast<double>(backoff.count()) * params_.backoff_factor));
    }
    limiter_.acquire();
    const auto start = std::chrono::steady_clock::now();
    BackendReply reply;
    try {
      reply = backend_->complete(prompt, params_);
    } catch (const std::exception& e) {
      reply = {BackendReply::Kind::Transient, e.what(), 0};
    }
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (transcript_) {
      json record = {{"timestamp", utc_timestamp()},
                     {"prompt_hash", prompt_hash(prompt)},
                     {"params", params_.sampling_json()},
                     {"attempt", attempt},
                     {"latency", latency},
                     {"prompt", prompt}};
      if (reply.kind == BackendReply::Kind::Ok)
        record["response"] = reply.text;
      else
        record["error"] = reply.text;
      record["status"] = reply.http_status;
      transcript_->append(record);
    }

    if (reply.kind == BackendReply::Kind::Ok) return reply.text;
    last_error = reply.text;
    if (reply.kind == BackendReply::Kind::Fatal) break;
  }
  throw LLMUnavailable("LLM unavailable: " + last_error);
}

std::vector<Outcome> Client::generate_batch(const std::vector<std::string>& prompts) {
  if (prompts.empty()) throw EmptyBatch("generate_batch needs at least one prompt");
  std::vector<Outcome> out(prompts.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i] = generate(prompts[i]);
    } catch (const std::exception& e) {
      out[i] = Failure{e.what()};
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(params_.parallelism), prompts.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) run_one(i);
      });
  }
  return out;
}

}  // namespace evobo::llm
