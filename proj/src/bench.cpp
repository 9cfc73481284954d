#include "rulcast/bench.hpp"

#include <algorithm>
#include <stdexcept>

#include "rulcast/mcmc.hpp"
#include "rulcast/proc.hpp"

namespace rulcast {

const char* bench_mode_name(BenchMode mode) {
  switch (mode) {
    case BenchMode::kSerial: return "serial";
    case BenchMode::kThreaded: return "threaded";
    case BenchMode::kRemoteModelEval: return "remote-model-eval";
    case BenchMode::kRemoteFullMutation: return "remote-full-mutation";
  }
  return "?";
}

BenchMode bench_mode_from_name(const std::string& name) {
  if (name == "serial") return BenchMode::kSerial;
  if (name == "threaded") return BenchMode::kThreaded;
  if (name == "remote-model-eval") return BenchMode::kRemoteModelEval;
  if (name == "remote-full-mutation") return BenchMode::kRemoteFullMutation;
  throw std::invalid_argument("unknown executor mode '" + name + "'");
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SpeedupReport run_benchmark(const BenchProblem& problem, const std::vector<BenchCell>& grid,
                            const BenchOptions& opt) {
  if (opt.repetitions < 3)
    throw std::invalid_argument("run_benchmark: repetitions must be >= 3");

  SpeedupReport report;
  report.repetitions = opt.repetitions;

  // Schedule probe with the cost knob off: the tempering schedule depends
  // only on seeds and data, so this is cheap and exact.
  CrackPosterior probe(problem.obs, problem.prior, problem.law);
  SerialExecutor probe_exec(probe);
  const auto probe_run = run_smc(problem.smc, probe, probe_exec);
  const auto n = static_cast<std::int64_t>(problem.smc.n_particles);
  report.smc_model_evals =
      n + n * (1 + problem.smc.n_mcmc) *
              static_cast<std::int64_t>(probe_run.schedule.size());

  CrackPosterior posterior(problem.obs, problem.prior, problem.law);
  posterior.set_eval_cost(problem.cost);

  // Baseline: serial MCMC with a matched number of model evaluations.
  report.baseline_n_samples = std::max<std::int64_t>(1, report.smc_model_evals - 1);
  McmcConfig base;
  base.n_samples = report.baseline_n_samples;
  base.n_burn = 0;
  base.thin = 1;
  base.seed = problem.smc.seed;
  base.init.log10_alpha =
      0.5 * (problem.prior.log10_alpha.lo + problem.prior.log10_alpha.hi);
  base.init.beta = 0.5 * (problem.prior.beta.lo + problem.prior.beta.hi);
  base.init.sigma = 1.0;
  {
    std::vector<double> walls;
    for (int r = 0; r < opt.repetitions; ++r)
      walls.push_back(run_mcmc(base, posterior).wall_ms);
    report.baseline_wall_ms = median(walls);
  }

  for (const auto& cell : grid) {
    BenchRow row;
    row.cell = cell;
    row.repetitions = opt.repetitions;
    try {
      std::vector<SpawnedWorker> workers;
      std::unique_ptr<MutationExecutor> exec;
      switch (cell.mode) {
        case BenchMode::kSerial:
          exec = std::make_unique<SerialExecutor>(posterior);
          break;
        case BenchMode::kThreaded:
          exec = std::make_unique<ThreadedExecutor>(posterior, cell.n_threads);
          break;
        case BenchMode::kRemoteModelEval:
        case BenchMode::kRemoteFullMutation: {
          if (opt.cli_binary.empty())
            throw std::runtime_error("remote cell requires a worker binary");
          if (cell.n_workers < 1)
            throw std::runtime_error("remote cell requires n_workers >= 1");
          WorkerSpawnOptions wopt;
          wopt.cli_binary = opt.cli_binary;
          wopt.data_path = opt.data_path;
          wopt.config_path = opt.config_path;
          wopt.eval_cost_us = problem.cost.micros;
          wopt.eval_cost_mode = problem.cost.mode == EvalCost::Mode::kBusy   ? "busy"
                                : problem.cost.mode == EvalCost::Mode::kWait ? "wait"
                                                                             : "none";
          wopt.concurrency = opt.worker_concurrency;
          RemoteConfig rcfg;
          for (int w = 0; w < cell.n_workers; ++w) {
            workers.push_back(spawn_worker(wopt));
            rcfg.endpoints.push_back(workers.back().endpoint);
          }
          rcfg.n_threads = cell.n_threads;
          rcfg.batch_size = cell.batch_size;
          exec = std::make_unique<RemoteExecutor>(
              cell.mode == BenchMode::kRemoteModelEval ? OffloadMode::kModelEval
                                                       : OffloadMode::kFullMutation,
              rcfg, posterior);
          break;
        }
      }
      std::vector<double> walls, mutates;
      for (int r = 0; r < opt.repetitions; ++r) {
        const auto run = run_smc(problem.smc, posterior, *exec);
        walls.push_back(run.wall_ms);
        mutates.push_back(run.mutate_ms);
      }
      row.wall_ms_median = median(walls);
      row.mutate_ms_median = median(mutates);
      row.speedup = report.baseline_wall_ms / row.wall_ms_median;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace rulcast
