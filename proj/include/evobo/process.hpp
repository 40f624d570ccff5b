#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace evobo::process {

using Clock = std::chrono::steady_clock;

/// A child started through `/bin/sh -c <command>` in its own process group,
/// with stdin, stdout and stderr connected to pipes. The destructor kills the
/// whole group and reaps it.
class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  enum class ReadStatus { Line, Eof, Timeout };
  struct ReadResult {
    ReadStatus status;
    std::string line;
  };

  /// Blocks until a full stdout line arrives, stdout closes or the deadline
  /// passes. Stderr is drained into a bounded buffer meanwhile.
  ReadResult read_line(Clock::time_point deadline);

  /// Writes `line` plus '\n' to the child's stdin. False if the pipe is gone.
  bool write_line(std::string_view line);

  void close_stdin();

  /// Sends SIGKILL to the process group.
  void kill();

  /// Waits up to `grace` for the child to exit, then kills it. Returns the raw
  /// wait status.
  int wait(std::chrono::milliseconds grace);

  /// Last bytes written to stderr.
  const std::string& stderr_tail() const noexcept { return stderr_; }

  pid_t pid() const noexcept { return pid_; }

  /// Human-readable description of a wait status ("exit code 1", "signal 9").
  static std::string describe_status(int status);

 private:
  void drain_stderr();

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  int stderr_fd_ = -1;
  bool reaped_ = false;
  int status_ = 0;
  std::string out_buffer_;
  std::string stderr_;
};

}  // namespace evobo::process
