#ifndef RULCAST_PROC_HPP
#define RULCAST_PROC_HPP

#include <memory>
#include <string>
#include <vector>

namespace rulcast {

// Minimal fork/exec wrapper with a pipe on the child's stdout. Used to run
// worker processes from the benchmark harness, the acceptance suite and the
// CLI integration tests.
class ChildProcess {
 public:
  explicit ChildProcess(std::vector<std::string> argv);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  // One '\n'-terminated line from the child's stdout; throws on timeout.
  std::string read_line(int timeout_ms);
  // SIGTERM, then SIGKILL if the child ignores it.
  void terminate();
  bool running();
  int pid() const { return pid_; }

 private:
  int pid_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
};

struct WorkerSpawnOptions {
  std::string cli_binary;
  std::string data_path;
  std::string config_path;  // optional
  std::string host = "127.0.0.1";
  double eval_cost_us = 0.0;
  std::string eval_cost_mode = "none";  // none | busy | wait
  int concurrency = 0;
  int startup_timeout_ms = 15000;
};

struct SpawnedWorker {
  std::unique_ptr<ChildProcess> proc;
  std::string endpoint;  // host:port, parsed from the worker's startup line
};

// Launches `<cli> worker --bind host:0 ...` and parses the announced port.
SpawnedWorker spawn_worker(const WorkerSpawnOptions& opt);

}  // namespace rulcast

#endif
