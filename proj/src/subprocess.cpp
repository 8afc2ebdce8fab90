// Copyright 2026 The CBO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>

#include "cbo/error.hpp"
#include "cbo/evaluator.hpp"

namespace cbo {

namespace {

using Clock = std::chrono::steady_clock;

// Cap on captured stderr kept for diagnostics.
constexpr std::size_t kMaxDiagnostics = 4096;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw Error(std::string("pipe failed: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(std::min<long long>(left, 1000));
}

void kill_group(pid_t pid) {
  ::kill(-pid, SIGKILL);
  ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
}

}  // namespace

EvalOutcome evaluate_subprocess(const std::string& command, const EvalRequest& request, double timeout_s) {
  ignore_sigpipe();
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  const std::string line = encode_request_line(request) + "\n";

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in.read.get(), STDIN_FILENO);
    ::dup2(out.write.get(), STDOUT_FILENO);
    ::dup2(err.write.get(), STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  in.read.reset();
  out.write.reset();
  err.write.reset();

  // A child that never reads its input is fine; only a broken pipe is tolerated here.
  const char* data = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(in.write.get(), data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
  in.write.reset();

  std::string stdout_buf;
  std::string stderr_buf;
  bool out_open = true;
  bool err_open = true;
  char chunk[4096];
  while (out_open || err_open) {
    if (Clock::now() >= deadline) {
      kill_group(pid);
      return {EvalStatus::kTimeout, {}, "timed out after " + std::to_string(timeout_s) + " s", elapsed_ms()};
    }
    pollfd fds[2];
    nfds_t count = 0;
    if (out_open) fds[count++] = {out.read.get(), POLLIN, 0};
    if (err_open) fds[count++] = {err.read.get(), POLLIN, 0};
    const int ready = ::poll(fds, count, remaining_ms(deadline));
    if (ready < 0 && errno != EINTR) break;
    for (nfds_t i = 0; i < count && ready > 0; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::read(fds[i].fd, chunk, sizeof chunk);
      const bool is_out = fds[i].fd == out.read.get();
      if (n <= 0) {
        (is_out ? out_open : err_open) = false;
        continue;
      }
      auto& buf = is_out ? stdout_buf : stderr_buf;
      if (buf.size() < (1u << 20)) buf.append(chunk, static_cast<std::size_t>(n));
    }
    // One response line is all we read; the child is then expected to exit.
    if (stdout_buf.find('\n') != std::string::npos) break;
  }

  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (Clock::now() >= deadline) {
      kill_group(pid);
      return {EvalStatus::kTimeout, {}, "timed out after " + std::to_string(timeout_s) + " s", elapsed_ms()};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  const double duration = elapsed_ms();
  if (stderr_buf.size() > kMaxDiagnostics) stderr_buf.resize(kMaxDiagnostics);

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string why = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                              : "terminated by signal " + std::to_string(WTERMSIG(status));
    return {EvalStatus::kEvalError, {}, "child failed with " + why + (stderr_buf.empty() ? "" : ": " + stderr_buf),
            duration};
  }
  const auto newline = stdout_buf.find('\n');
  const std::string response_line = stdout_buf.substr(0, newline);
  if (response_line.empty()) {
    return {EvalStatus::kEvalError, {}, "child produced no response line", duration};
  }
  try {
    EvalResponse r = decode_response_line(response_line, request.id);
    return {EvalStatus::kOk, std::move(r.metrics), std::move(r.diagnostics), duration};
  } catch (const Error& e) {
    return {EvalStatus::kEvalError, {}, std::string("malformed response: ") + e.what(), duration};
  }
}

}  // namespace cbo
