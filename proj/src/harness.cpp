#include "evobo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "evobo/errors.hpp"
#include "evobo/process.hpp"
#include "evobo/protocol.hpp"

namespace evobo::harness {

namespace proto = evobo::protocol;

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::Completed: return "completed";
    case SessionStatus::WorkerError: return "worker_error";
    case SessionStatus::Crashed: return "crashed";
    case SessionStatus::Timeout: return "timeout";
    case SessionStatus::ProtocolError: return "protocol_error";
  }
  return "unknown";
}

NativeRunner::NativeRunner(std::string name, Algorithm algorithm)
    : name_(std::move(name)), algorithm_(std::move(algorithm)) {}

SessionOutcome NativeRunner::run(EvalSession& session, Millis /*time_limit*/) const {
  SessionOutcome out;
  try {
    algorithm_(session);
  } catch (const BudgetExhausted&) {
    out.notes.emplace_back("budget exhausted");
  } catch (const std::exception& e) {
    out.status = SessionStatus::WorkerError;
    out.error = e.what();
  }
  return out;
}

ProcessRunner::ProcessRunner(std::string command) : command_(std::move(command)) {}

SessionOutcome ProcessRunner::run(EvalSession& session, Millis time_limit) const {
  using process::ChildProcess;
  SessionOutcome out;
  const auto deadline = process::Clock::now() + time_limit;

  auto fail = [&out](SessionStatus status, std::string message) {
    out.status = status;
    out.error = std::move(message);
    return out;
  };
  auto with_stderr = [](std::string msg, const ChildProcess& child) {
    std::string tail = child.stderr_tail();
    while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r')) tail.pop_back();
    if (!tail.empty()) msg += ": " + tail;
    return msg;
  };

  ChildProcess child(command_);
  proto::Init init{session.dim(), session.budget(), session.lower(), session.upper(), session.seed()};
  if (!child.write_line(proto::encode_message(init))) {
    const int status = child.wait(Millis(1000));
    return fail(SessionStatus::Crashed,
                with_stderr("worker exited before init (" + ChildProcess::describe_status(status) + ")",
                            child));
  }

  int line_no = 0;
  for (;;) {
    auto r = child.read_line(deadline);
    if (r.status == ChildProcess::ReadStatus::Timeout) {
      child.kill();
      child.wait(Millis(0));
      return fail(SessionStatus::Timeout, "timeout");
    }
    if (r.status == ChildProcess::ReadStatus::Eof) {
      const int status = child.wait(Millis(1000));
      return fail(SessionStatus::Crashed,
                  with_stderr("worker exited without done (" + ChildProcess::describe_status(status) + ")",
                              child));
    }
    ++line_no;

    proto::Message msg;
    try {
      msg = proto::decode_message(r.line);
    } catch (const ParseError& e) {
      child.kill();
      child.wait(Millis(0));
      return fail(SessionStatus::ProtocolError,
                  "protocol parse error at line " + std::to_string(line_no) + ": " + e.what());
    }

    if (auto* ask = std::get_if<proto::Ask>(&msg)) {
      if (session.remaining() == 0) {
        child.write_line(proto::encode_message(proto::ErrorMessage{"budget exhausted"}));
        child.close_stdin();
        child.wait(Millis(200));
        out.notes.emplace_back("budget exhausted");
        return out;
      }
      if (static_cast<int>(ask->point.size()) != session.dim()) {
        child.kill();
        child.wait(Millis(0));
        return fail(SessionStatus::ProtocolError,
                    "protocol violation at line " + std::to_string(line_no) + ": ask has " +
                        std::to_string(ask->point.size()) + " coordinates, expected " +
                        std::to_string(session.dim()));
      }
      const double y = session(ask->point);
      if (!child.write_line(proto::encode_message(proto::Tell{y}))) {
        const int status = child.wait(Millis(1000));
        return fail(SessionStatus::Crashed,
                    with_stderr("worker closed its input (" + ChildProcess::describe_status(status) + ")",
                                child));
      }
      continue;
    }
    if (std::holds_alternative<proto::Done>(msg)) {
      child.close_stdin();
      child.wait(Millis(1000));
      return out;
    }
    if (auto* err = std::get_if<proto::ErrorMessage>(&msg)) {
      child.close_stdin();
      child.wait(Millis(1000));
      return fail(SessionStatus::WorkerError, "worker error: " + err->message);
    }
    child.kill();
    child.wait(Millis(0));
    return fail(SessionStatus::ProtocolError, "protocol violation at line " + std::to_string(line_no) +
                                                  ": unexpected '" +
                                                  std::string(proto::message_kind(msg)) + "' message");
  }
}

std::string expand_command(const std::string& command_template,
                           const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out = command_template;
  for (const auto& [key, value] : values) {
    const std::string token = "{" + key + "}";
    for (std::size_t pos = out.find(token); pos != std::string::npos;
         pos = out.find(token, pos + value.size()))
      out.replace(pos, token.size(), value);
  }
  return out;
}

Millis EvalSettings::session_slice() const {
  const auto sessions = std::max<std::size_t>(1, specs.size() * seeds.size());
  return std::max(min_session_slice, Millis(time_limit.count() / static_cast<long long>(sessions)));
}

CandidateEvaluation run_candidate(const CandidateRunner& runner, const EvalSettings& settings) {
  struct Job {
    suite::ProblemSpec spec;
    std::int64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& spec : settings.specs)
    for (auto seed : settings.seeds) jobs.push_back({spec, seed});

  CandidateEvaluation eval;
  eval.cells.resize(jobs.size());
  const Millis slice = settings.session_slice();

  auto run_one = [&](std::size_t i) {
    const auto& job = jobs[i];
    CellResult& cell = eval.cells[i];
    cell.spec = job.spec;
    cell.seed = job.seed;
    try {
      EvalSession session(suite::make_instance(job.spec), settings.budget, job.seed);
      cell.outcome = runner.run(session, slice);
      cell.trace = session.trace();
      cell.points = session.points();
      cell.raw_values = session.raw_values();
    } catch (const std::exception& e) {
      cell.outcome.status = SessionStatus::Crashed;
      cell.outcome.error = e.what();
    }
    if (cell.outcome.ok() && cell.trace.empty()) {
      cell.outcome.status = SessionStatus::WorkerError;
      cell.outcome.error = "no evaluations returned";
    }
    if (cell.outcome.ok()) {
      auto cfg = metrics::AOCCConfig::for_dimension(job.spec.dim, settings.budget);
      if (settings.ub_override) cfg.ub = *settings.ub_override;
      cell.aocc = metrics::aocc(cell.trace, cfg);
    }
    if (settings.transcript_dir) {
      std::filesystem::create_directories(*settings.transcript_dir);
      const auto name = "session_f" + std::to_string(job.spec.function_id) + "_i" +
                        std::to_string(job.spec.instance_id) + "_d" + std::to_string(job.spec.dim) +
                        "_s" + std::to_string(job.seed) + ".jsonl";
      write_transcript(*settings.transcript_dir / name, cell, settings.budget);
    }
  };

  const int workers = std::clamp<int>(settings.workers, 1, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
      });
  }

  for (const auto& cell : eval.cells) {
    metrics::CellScore score;
    score.function_id = cell.spec.function_id;
    score.instance_id = cell.spec.instance_id;
    score.seed = static_cast<int>(cell.seed);
    score.aocc = cell.aocc;
    score.error = cell.outcome.error;
    eval.report.cells.push_back(std::move(score));
  }
  eval.report.aggregate = eval.report.cells.empty() ? 0.0 : metrics::aggregate_fitness(eval.report.cells);
  return eval;
}

SmokeResult smoke_test(const CandidateRunner& runner, Millis time_limit) {
  SmokeResult result;
  try {
    EvalSession session(suite::make_instance({1, 1, 2}), 5, 0);
    const auto outcome = runner.run(session, time_limit);
    result.passed = outcome.ok();
    result.error = outcome.error;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

void write_transcript(const std::filesystem::path& file, const CellResult& cell, int budget) {
  std::ofstream os(file);
  if (!os) throw Error("cannot write transcript " + file.string());
  os << proto::encode_message(proto::Init{cell.spec.dim, budget, cell.spec.lower(), cell.spec.upper(),
                                          cell.seed})
     << '\n';
  for (std::size_t i = 0; i < cell.points.size(); ++i) {
    os << proto::encode_message(proto::Ask{cell.points[i]}) << '\n';
    os << proto::encode_message(proto::Tell{cell.raw_values[i]}) << '\n';
  }
  if (cell.outcome.ok())
    os << proto::encode_message(proto::Done{}) << '\n';
  else
    os << proto::encode_message(proto::ErrorMessage{cell.outcome.error}) << '\n';
}

std::vector<std::vector<double>> read_transcript_points(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw NoData("cannot read transcript " + file.string());
  std::vector<std::vector<double>> points;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto msg = proto::decode_message(line);
    if (auto* ask = std::get_if<proto::Ask>(&msg)) points.push_back(std::move(ask->point));
  }
  return points;
}

}  // namespace evobo::harness
