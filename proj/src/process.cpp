#include "evobo/process.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "evobo/errors.hpp"

namespace evobo::process {

namespace {

constexpr std::size_t kMaxStderr = 16 * 1024;
constexpr std::size_t kMaxLine = 64 * 1024 * 1024;

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(std::min<long long>(left.count(), 1 << 30));
}

}  // namespace

ChildProcess::ChildProcess(const std::string& command) {
  ignore_sigpipe_once();
  int in[2], out[2], err[2];
  if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0 || ::pipe2(err, O_CLOEXEC) != 0)
    throw Error(std::string("pipe failed: ") + std::strerror(errno));

  pid_ = ::fork();
  if (pid_ < 0) throw Error(std::string("fork failed: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::setpgid(0, 0);
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::dup2(err[1], STDERR_FILENO);
    std::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);
  ::close(in[0]);
  ::close(out[1]);
  ::close(err[1]);
  stdin_fd_ = in[1];
  stdout_fd_ = out[0];
  stderr_fd_ = err[0];
}

ChildProcess::~ChildProcess() {
  close_fd(stdin_fd_);
  if (!reaped_) {
    kill();
    wait(std::chrono::milliseconds(0));
  }
  close_fd(stdout_fd_);
  close_fd(stderr_fd_);
}

void ChildProcess::drain_stderr() {
  if (stderr_fd_ < 0) return;
  char buf[4096];
  const ssize_t n = ::read(stderr_fd_, buf, sizeof buf);
  if (n <= 0) {
    close_fd(stderr_fd_);
    return;
  }
  stderr_.append(buf, static_cast<std::size_t>(n));
  if (stderr_.size() > kMaxStderr) stderr_.erase(0, stderr_.size() - kMaxStderr);
}

ChildProcess::ReadResult ChildProcess::read_line(Clock::time_point deadline) {
  for (;;) {
    if (const auto nl = out_buffer_.find('\n'); nl != std::string::npos) {
      std::string line = out_buffer_.substr(0, nl);
      out_buffer_.erase(0, nl + 1);
      return {ReadStatus::Line, std::move(line)};
    }
    if (stdout_fd_ < 0) {
      if (!out_buffer_.empty()) return {ReadStatus::Line, std::exchange(out_buffer_, {})};
      return {ReadStatus::Eof, {}};
    }

    pollfd fds[2] = {{stdout_fd_, POLLIN, 0}, {stderr_fd_, POLLIN, 0}};
    const nfds_t count = stderr_fd_ >= 0 ? 2 : 1;
    const int ready = ::poll(fds, count, remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) return {ReadStatus::Timeout, {}};

    if (count == 2 && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) drain_stderr();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[8192];
      const ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
      if (n <= 0) {
        close_fd(stdout_fd_);
      } else {
        out_buffer_.append(buf, static_cast<std::size_t>(n));
        if (out_buffer_.size() > kMaxLine) throw Error("worker line exceeds size limit");
      }
    }
  }
}

bool ChildProcess::write_line(std::string_view line) {
  if (stdin_fd_ < 0) return false;
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(stdin_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      close_fd(stdin_fd_);
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void ChildProcess::close_stdin() { close_fd(stdin_fd_); }

void ChildProcess::kill() {
  if (pid_ > 0 && !reaped_) ::kill(-pid_, SIGKILL);
}

int ChildProcess::wait(std::chrono::milliseconds grace) {
  if (reaped_) return status_;
  const auto deadline = Clock::now() + grace;
  for (;;) {
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      reaped_ = true;
      status_ = status;
      // Reap stragglers left in the group.
      ::kill(-pid_, SIGKILL);
      return status_;
    }
    if (r < 0 && errno != EINTR) {
      reaped_ = true;
      return status_;
    }
    if (Clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  kill();
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
  status_ = status;
  return status_;
}

std::string ChildProcess::describe_status(int status) {
  if (WIFEXITED(status)) return "exit code " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "status " + std::to_string(status);
}

}  // namespace evobo::process
