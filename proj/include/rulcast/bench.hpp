#ifndef RULCAST_BENCH_HPP
#define RULCAST_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/remote.hpp"
#include "rulcast/smc.hpp"

namespace rulcast {

enum class BenchMode { kSerial, kThreaded, kRemoteModelEval, kRemoteFullMutation };

const char* bench_mode_name(BenchMode mode);
BenchMode bench_mode_from_name(const std::string& name);

struct BenchCell {
  BenchMode mode = BenchMode::kSerial;
  int n_threads = 1;
  std::size_t batch_size = 1;
  int n_workers = 0;  // remote modes only
};

struct BenchRow {
  BenchCell cell;
  int repetitions = 0;
  double wall_ms_median = 0.0;
  double mutate_ms_median = 0.0;
  double speedup = 0.0;  // baseline_wall / wall
  std::string error;     // cell failures are recorded, not fatal
};

struct SpeedupReport {
  double baseline_wall_ms = 0.0;      // serial MCMC on the same problem
  std::int64_t baseline_n_samples = 0;  // matched to the SMC model-eval count
  std::int64_t smc_model_evals = 0;
  int repetitions = 0;
  std::vector<BenchRow> rows;
  std::string notes;
};

struct BenchProblem {
  ObservationSeries obs;
  PriorSpec prior{};
  GrowthLaw law{};
  EvalCost cost{};
  SmcConfig smc{};
};

struct BenchOptions {
  int repetitions = 3;
  // Worker processes are spawned through the CLI binary; remote cells fail
  // (and are recorded) when it is empty.
  std::string cli_binary;
  std::string data_path;
  std::string config_path;
  int worker_concurrency = 1;  // 1 emulates single-core cloud workers
};

// Measures median wall time per cell against a serial-MCMC baseline with a
// matched model-evaluation count. The tempering schedule is deterministic in
// the seed, so every cell performs identical numerical work.
SpeedupReport run_benchmark(const BenchProblem& problem, const std::vector<BenchCell>& grid,
                            const BenchOptions& opt);

}  // namespace rulcast

#endif
