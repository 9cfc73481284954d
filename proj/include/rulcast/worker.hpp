#ifndef RULCAST_WORKER_HPP
#define RULCAST_WORKER_HPP

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "rulcast/bayes.hpp"

namespace httplib {
class Server;
}

namespace rulcast {

struct WorkerOptions {
  std::string host = "127.0.0.1";
  int port = 0;        // 0: pick any free port
  int concurrency = 0;  // 0: httplib default; 1 emulates a single-core worker
};

// Stateless-per-request worker process: the problem definition (observations,
// law, prior) is loaded at startup and every request must present a matching
// digest. Serves:
//   POST /v1/model-eval   params batch -> predictions at the observation cycles
//   POST /v1/mutate       MutationJob -> mutated params + log_like + accepts
//   GET  /v1/health       status + dataset digest
class WorkerServer {
 public:
  WorkerServer(const CrackPosterior& problem, WorkerOptions opt);
  ~WorkerServer();

  WorkerServer(const WorkerServer&) = delete;
  WorkerServer& operator=(const WorkerServer&) = delete;

  // Binds and returns the actual port (resolves port 0).
  int bind();
  // Blocking listen; returns after stop().
  void run();
  // bind() + listen on a background thread (tests, benchmark harness).
  int start_async();
  void stop();

  const std::string& digest() const { return digest_; }
  int port() const { return port_; }

 private:
  void install_routes();

  const CrackPosterior& problem_;
  WorkerOptions opt_;
  std::string digest_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  int port_ = -1;
};

}  // namespace rulcast

#endif
