#ifndef RULCAST_IO_HPP
#define RULCAST_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/bench.hpp"
#include "rulcast/mcmc.hpp"
#include "rulcast/rul.hpp"
#include "rulcast/smc.hpp"

namespace rulcast {

// Two-column delimited text (cycle, crack_length_mm); '#' comment lines and
// an optional header row; whitespace or comma separators. Validation errors
// carry 1-based line numbers.
ObservationSeries ingest_observations(const std::string& path);
void write_observations(const std::string& path, const ObservationSeries& obs);

// Evenly spaced cycles over [0, cycle_span]; model trajectory plus iid
// Gaussian noise, truncated below at a small positive floor.
ObservationSeries synth_data(const ModelParams& truth, const GrowthLaw& law,
                             std::size_t n_points, std::int64_t cycle_span,
                             std::uint64_t seed);

// Derivative-free simplex minimization of SS_q over (log10_alpha, beta) with
// shrinking restarts; sigma is set to sqrt(SS/n) at the optimum.
struct FitOptions {
  double init_log10_alpha = -4.0;
  double init_beta = 1.0;
  int max_iters = 600;  // per restart
  int restarts = 5;
  double ftol = 1e-14;
};
struct FitResult {
  ModelParams params{};
  double ss = 0.0;
  bool converged = false;
  int evals = 0;
};
FitResult least_squares_fit(const ObservationSeries& obs, const GrowthLaw& law,
                            const FitOptions& opt);
// Initial guess from the data: exponential-growth slope heuristic.
FitOptions default_fit_init(const ObservationSeries& obs, const GrowthLaw& law);

// ---- run configuration -----------------------------------------------------

// Declarative run configuration shared by every CLI command; JSON on disk.
struct RunConfig {
  std::uint64_t seed = 1;
  GrowthLaw law{};
  PriorSpec prior{};
  McmcConfig mcmc{};
  std::optional<ModelParams> mcmc_init;  // else: least-squares fit at run time
  SmcConfig smc{};

  std::string exec_mode = "serial";
  std::vector<std::string> workers;
  int n_threads = 4;
  std::size_t batch_size = 32;
  RetryPolicy retry{};
  int request_timeout_s = 60;
  int worker_concurrency = 0;

  std::vector<std::int64_t> rul_checkpoints;
  int band_grid_points = 50;
  double horizon_multiple = 10.0;

  EvalCost cost{};

  std::vector<BenchCell> bench_grid;
  int bench_repetitions = 3;
};

RunConfig default_run_config();
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& cfg);

// ---- run records ------------------------------------------------------------

// A RunRecord directory fully determines re-execution:
//   record.json   config snapshot, dataset digest, seed, diagnostics and the
//                 draws as base64 arrays (bit-exact)
//   draws.tsv     human-readable draws
//   summary.tsv   marginal moments + correlations
//   schedule.tsv  tempering schedule (smc) / acceptance trace (mcmc)
struct RunRecord {
  std::string run_id;
  std::string command;  // "mcmc" | "smc"
  std::uint64_t seed = 0;
  std::string dataset_digest;
  std::string dataset_path;
  std::string config_json;
  PosteriorSamples samples;
  std::vector<SmcStepDiag> schedule;   // smc only
  std::vector<double> window_accept;   // mcmc only
  double wall_ms = 0.0;
  double mutate_ms = 0.0;
};

void write_run_record(const std::string& dir, const RunRecord& rec);
RunRecord load_run_record(const std::string& dir);

void write_band_tsv(const std::string& path, const PredictiveBand& band);
void write_rul_tsv(const std::string& path, const std::vector<RulDistribution>& series);
void write_bench_report(const std::string& dir, const SpeedupReport& report);

}  // namespace rulcast

#endif
