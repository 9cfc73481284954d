#ifndef RULCAST_REMOTE_HPP
#define RULCAST_REMOTE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/mutation.hpp"

namespace rulcast {

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_base_ms = 100;  // doubled per attempt
};

struct RemoteConfig {
  std::vector<std::string> endpoints;  // host:port
  int n_threads = 4;                   // dispatcher threads
  std::size_t batch_size = 32;         // particles per request
  RetryPolicy retry{};
  int request_timeout_s = 60;
};

// (a) ship model evaluations, run the MCMC kernel locally;
// (b) ship entire mutation rounds.
enum class OffloadMode { kModelEval, kFullMutation };

struct JobSlice {
  std::size_t begin = 0;
  std::size_t end = 0;
};
// ceil(n / batch_size) contiguous slices covering [0, n).
std::vector<JobSlice> partition_jobs(std::size_t n, std::size_t batch_size);

// Runs jobs 0..n-1 across a bounded thread team (claim by atomic counter).
// The first job exception, if any, is rethrown after all threads join.
void dispatch_parallel(std::size_t n_jobs, int n_threads,
                       const std::function<void(std::size_t)>& run);

// Coordinator-side executor for both offload modes. Jobs are idempotent
// (workers are pure given dataset + job), so retries and endpoint failover
// are safe; partial results are never accepted.
class RemoteExecutor final : public MutationExecutor {
 public:
  RemoteExecutor(OffloadMode mode, RemoteConfig cfg, const CrackPosterior& problem);

  // GET /v1/health on every endpoint and verify the dataset digest.
  // Called lazily on first mutate; available up front for CLI diagnostics.
  void check_workers();

  void mutate(std::vector<Particle>& particles, const MutationContext& ctx,
              MutationStats& stats) override;
  const char* mode_name() const override {
    return mode_ == OffloadMode::kModelEval ? "remote-model-eval"
                                            : "remote-full-mutation";
  }

 private:
  std::string post_with_retry(std::size_t job_index, const std::string& path,
                              const std::string& body, const std::string& job_id) const;
  void mutate_model_eval(std::vector<Particle>& particles, const MutationContext& ctx,
                         MutationStats& stats);
  void mutate_full(std::vector<Particle>& particles, const MutationContext& ctx,
                   MutationStats& stats);

  OffloadMode mode_;
  RemoteConfig cfg_;
  const CrackPosterior& problem_;
  std::string digest_;
  bool checked_ = false;
};

}  // namespace rulcast

#endif
