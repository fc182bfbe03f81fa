// Copyright 2026 The GLP Authors
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

#include "glp/bridge/session.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <limits>

extern char** environ;

namespace glp::bridge {
namespace {

// Writes with SIGPIPE blocked for this thread, so a dead worker shows up as
// EPIPE instead of killing the process. Returns errno, or 0.
int write_without_sigpipe(int fd, const std::string& bytes) {
  sigset_t pipe_set;
  sigset_t old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
  int err = 0;
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      err = errno;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  if (err == EPIPE) {
    // Swallow the SIGPIPE raised for this thread before unblocking it.
    const timespec zero{0, 0};
    while (sigtimedwait(&pipe_set, nullptr, &zero) > 0) {
    }
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  return err;
}

}  // namespace

std::string WorkerCommand::display() const {
  std::string out;
  for (const std::string& a : argv) out += (out.empty() ? "" : " ") + a;
  return out;
}

Session::Session(const WorkerCommand& command, std::chrono::milliseconds handshake_timeout) {
  if (command.argv.empty()) throw InvalidRequest("worker command is empty");
  int in[2];
  int out[2];
  if (pipe2(in, O_CLOEXEC) != 0) throw TransportError("pipe: " + std::string(std::strerror(errno)));
  if (pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw TransportError("pipe: " + std::string(std::strerror(errno)));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out[1], STDOUT_FILENO);
  std::vector<char*> argv;
  for (const std::string& a : command.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const int rc = posix_spawnp(&pid_, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in[0]);
  ::close(out[1]);
  if (rc != 0) {
    ::close(in[1]);
    ::close(out[0]);
    throw TransportError("cannot start worker '" + command.display() +
                         "': " + std::strerror(rc));
  }
  to_worker_ = in[1];
  from_worker_ = out[0];
  reader_ = std::thread([this] { reader_loop(); });

  try {
    write_all(encode(WireHello{kProtocolVersion, "glp/" + std::to_string(kProtocolVersion)}));
    std::unique_lock lock(mu_);
    const bool answered = changed_.wait_for(lock, handshake_timeout, [this] {
      return hello_.has_value() || closed_ || handshake_error_.has_value();
    });
    if (handshake_error_) throw *handshake_error_;
    if (hello_) {
      agent_ = hello_->agent;
    } else if (closed_) {
      throw TransportError("worker '" + command.display() +
                           "' exited during the handshake: " + close_reason_);
    } else if (!answered) {
      throw OracleError("worker '" + command.display() + "' sent no hello within " +
                        std::to_string(handshake_timeout.count()) + " ms");
    }
  } catch (...) {
    shutdown();
    throw;
  }
}

Session::~Session() { shutdown(); }

void Session::shutdown() {
  if (pid_ < 0) return;
  stopping_ = true;
  if (to_worker_ >= 0) {
    ::close(to_worker_);
    to_worker_ = -1;
  }
  // Closing stdin asks the worker to leave; insist after a grace period.
  int status = 0;
  bool reaped = false;
  for (int i = 0; i < 200 && !reaped; ++i) {
    reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
    if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (!reaped) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  if (reader_.joinable()) reader_.join();
  if (from_worker_ >= 0) {
    ::close(from_worker_);
    from_worker_ = -1;
  }
}

void Session::write_all(const std::string& bytes) {
  std::lock_guard wlock(write_mu_);
  const int err = to_worker_ < 0 ? EPIPE : write_without_sigpipe(to_worker_, bytes);
  if (err != 0) {
    std::lock_guard lock(mu_);
    if (!closed_) {
      closed_ = true;
      close_reason_ = std::string("write to worker failed: ") + std::strerror(err);
    }
    changed_.notify_all();
    throw TransportError(close_reason_);
  }
}

void Session::send_raw(const std::string& bytes) { write_all(bytes); }

std::uint64_t Session::submit(WireRequest request) {
  {
    std::lock_guard lock(mu_);
    if (closed_) throw TransportError("worker is gone: " + close_reason_);
    request.id = next_id_++;
    ids_.open(request.id);
  }
  write_all(encode(request));
  return request.id;
}

std::optional<WireResponse> Session::wait(std::uint64_t id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!ids_.pending(id) && !arrived_.contains(id)) {
    throw InvalidRequest("request " + std::to_string(id) + " is not pending");
  }
  changed_.wait_for(lock, timeout, [&] { return arrived_.contains(id) || closed_; });
  if (const auto it = arrived_.find(id); it != arrived_.end()) {
    WireResponse r = std::move(it->second);
    arrived_.erase(it);
    return r;
  }
  if (closed_) throw TransportError("worker is gone: " + close_reason_);
  abandoned_.insert(id);
  return std::nullopt;
}

bool Session::alive() const {
  std::lock_guard lock(mu_);
  return !closed_;
}

std::vector<std::string> Session::protocol_errors() const {
  std::lock_guard lock(mu_);
  return errors_;
}

void Session::handle_line(const LineReader::Line& line) {
  std::lock_guard lock(mu_);
  WireMessage message;
  try {
    message = decode(line.text, line.offset);
  } catch (const FormatError& e) {
    if (!hello_ && !handshake_error_) {
      handshake_error_ = e;
    } else {
      errors_.push_back(e.what());
    }
    changed_.notify_all();
    return;
  }
  const std::string at = " (at byte offset " + std::to_string(line.offset) + ")";
  if (const auto* h = std::get_if<WireHello>(&message)) {
    if (hello_) {
      errors_.push_back("repeated hello" + at);
    } else {
      hello_ = *h;
    }
  } else if (const auto* r = std::get_if<WireResponse>(&message)) {
    if (!ids_.close(r->id)) {
      errors_.push_back("result for unknown or answered id " + std::to_string(r->id) + at);
    } else if (abandoned_.erase(r->id) == 0) {
      arrived_.emplace(r->id, *r);
    }
  } else if (const auto* e = std::get_if<WireError>(&message)) {
    if (e->id && ids_.close(*e->id)) {
      if (abandoned_.erase(*e->id) == 0) {
        WireResponse failed;
        failed.id = *e->id;
        failed.status = WireStatus::kFailed;
        failed.metric = kFailedScore;
        failed.validation_loss = std::numeric_limits<double>::quiet_NaN();
        failed.worker = agent_;
        failed.detail = "worker rejected the request: " + e->message;
        arrived_.emplace(failed.id, std::move(failed));
      }
    } else {
      errors_.push_back("worker reported" +
                        (e->id ? " for id " + std::to_string(*e->id) : std::string()) +
                        ": " + e->message + at);
    }
  } else {
    errors_.push_back("worker sent a request" + at);
  }
  changed_.notify_all();
}

void Session::reader_loop() {
  LineReader reader;
  char buf[1 << 16];
  std::string reason = "worker closed its output";
  for (;;) {
    pollfd p{from_worker_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) {
      reason = std::string("poll failed: ") + std::strerror(errno);
      break;
    }
    if (ready <= 0) {
      if (stopping_) break;
      continue;
    }
    const ssize_t n = ::read(from_worker_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      reason = std::string("read failed: ") + std::strerror(errno);
      break;
    }
    if (n == 0) break;
    reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    while (auto line = reader.next()) handle_line(*line);
  }
  std::lock_guard lock(mu_);
  try {
    reader.finish();
  } catch (const FormatError& e) {
    errors_.push_back(e.what());
  }
  if (!closed_) {
    closed_ = true;
    close_reason_ = reason;
  }
  changed_.notify_all();
}

}  // namespace glp::bridge
