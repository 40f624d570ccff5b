#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evobo/metrics.hpp"
#include "evobo/session.hpp"
#include "evobo/suite.hpp"

namespace evobo::harness {

using Millis = std::chrono::milliseconds;

enum class SessionStatus {
  Completed,      // worker sent done, or ran the budget out
  WorkerError,    // worker reported an error message
  Crashed,        // worker exited or closed its output without done
  Timeout,        // worker exceeded its time slice and was killed
  ProtocolError,  // unparseable or out-of-order message
};

std::string_view to_string(SessionStatus s) noexcept;

struct SessionOutcome {
  SessionStatus status = SessionStatus::Completed;
  std::string error;               // empty when Completed
  std::vector<std::string> notes;  // non-fatal diagnostics, e.g. "budget exhausted"

  bool ok() const noexcept { return status == SessionStatus::Completed; }
};

/// Drives one optimizer over an EvalSession.
class CandidateRunner {
 public:
  virtual ~CandidateRunner() = default;
  virtual SessionOutcome run(EvalSession& session, Millis time_limit) const = 0;
  virtual std::string describe() const = 0;
};

/// Calls an optimizer in-process. The time limit is not enforced.
class NativeRunner final : public CandidateRunner {
 public:
  using Algorithm = std::function<void(Objective&)>;
  NativeRunner(std::string name, Algorithm algorithm);

  SessionOutcome run(EvalSession& session, Millis time_limit) const override;
  std::string describe() const override { return "native:" + name_; }

 private:
  std::string name_;
  Algorithm algorithm_;
};

/// Launches a worker through `/bin/sh -c` and speaks the wire protocol with it.
class ProcessRunner final : public CandidateRunner {
 public:
  explicit ProcessRunner(std::string command);

  SessionOutcome run(EvalSession& session, Millis time_limit) const override;
  std::string describe() const override { return "process:" + command_; }
  const std::string& command() const noexcept { return command_; }

 private:
  std::string command_;
};

/// Replaces `{name}` placeholders in a launch command template.
std::string expand_command(const std::string& command_template,
                           const std::vector<std::pair<std::string, std::string>>& values);

struct EvalSettings {
  std::vector<suite::ProblemSpec> specs;
  std::vector<std::int64_t> seeds{0};
  int budget = 100;
  Millis time_limit = std::chrono::minutes(30);  // whole benchmark
  Millis min_session_slice = std::chrono::seconds(30);
  int workers = 1;
  std::optional<double> ub_override;
  std::optional<std::filesystem::path> transcript_dir;

  /// Per-session slice: time_limit / sessions, never below min_session_slice.
  Millis session_slice() const;
};

struct CellResult {
  suite::ProblemSpec spec;
  std::int64_t seed = 0;
  metrics::Trace trace;
  std::vector<std::vector<double>> points;
  std::vector<double> raw_values;
  SessionOutcome outcome;
  std::optional<double> aocc;
};

struct CandidateEvaluation {
  metrics::FitnessReport report;
  std::vector<CellResult> cells;
};

/// Runs one session per (spec, seed). Failed sessions score 0; nothing a
/// candidate does escapes as an exception.
CandidateEvaluation run_candidate(const CandidateRunner& runner, const EvalSettings& settings);

struct SmokeResult {
  bool passed = false;
  std::string error;
};

/// Dummy-problem check: 2-d sphere, budget 5.
SmokeResult smoke_test(const CandidateRunner& runner, Millis time_limit = std::chrono::seconds(30));

/// Writes the exchange of one session as protocol lines (init, ask/tell pairs,
/// then done or error).
void write_transcript(const std::filesystem::path& file, const CellResult& cell, int budget);

/// Reads the asked points back from a transcript file.
std::vector<std::vector<double>> read_transcript_points(const std::filesystem::path& file);

}  // namespace evobo::harness
