#include "rulcast/proc.hpp"

#include <csignal>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace rulcast {

ChildProcess::ChildProcess(std::vector<std::string> argv) {
  if (argv.empty()) throw std::invalid_argument("ChildProcess: empty argv");
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("ChildProcess: pipe() failed");
  const int pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw std::runtime_error("ChildProcess: fork() failed");
  }
  if (pid == 0) {
    close(fds[0]);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    execv(cargv[0], cargv.data());
    _exit(127);
  }
  close(fds[1]);
  pid_ = pid;
  out_fd_ = fds[0];
}

ChildProcess::~ChildProcess() {
  terminate();
  if (out_fd_ >= 0) close(out_fd_);
}

std::string ChildProcess::read_line(int timeout_ms) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    pollfd pfd{out_fd_, POLLIN, 0};
    const int rc = poll(&pfd, 1, timeout_ms);
    if (rc == 0) throw std::runtime_error("ChildProcess: timed out waiting for output");
    if (rc < 0) throw std::runtime_error("ChildProcess: poll() failed");
    char chunk[512];
    const ssize_t n = read(out_fd_, chunk, sizeof chunk);
    if (n <= 0) throw std::runtime_error("ChildProcess: child closed stdout");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ChildProcess::terminate() {
  if (pid_ < 0) return;
  kill(pid_, SIGTERM);
  for (int i = 0; i < 50; ++i) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    usleep(20000);
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

bool ChildProcess::running() {
  if (pid_ < 0) return false;
  int status = 0;
  const int rc = waitpid(pid_, &status, WNOHANG);
  if (rc == pid_) {
    pid_ = -1;
    return false;
  }
  return rc == 0;
}

SpawnedWorker spawn_worker(const WorkerSpawnOptions& opt) {
  std::vector<std::string> argv{opt.cli_binary, "worker",
                                "--bind", opt.host + ":0",
                                "--data", opt.data_path};
  if (!opt.config_path.empty()) {
    argv.push_back("--config");
    argv.push_back(opt.config_path);
  }
  if (opt.eval_cost_us > 0.0) {
    argv.push_back("--eval-cost-us");
    argv.push_back(std::to_string(opt.eval_cost_us));
    argv.push_back("--eval-cost-mode");
    argv.push_back(opt.eval_cost_mode);
  }
  if (opt.concurrency > 0) {
    argv.push_back("--concurrency");
    argv.push_back(std::to_string(opt.concurrency));
  }

  SpawnedWorker w;
  w.proc = std::make_unique<ChildProcess>(std::move(argv));
  // The worker announces "listening on <host:port>" once it is ready.
  const std::string line = w.proc->read_line(opt.startup_timeout_ms);
  const auto pos = line.rfind("listening on ");
  if (pos == std::string::npos)
    throw std::runtime_error("spawn_worker: unexpected startup line: " + line);
  w.endpoint = line.substr(pos + std::strlen("listening on "));
  return w;
}

}  // namespace rulcast
