#include "rulcast/remote.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "rulcast/wire.hpp"

namespace rulcast {

std::vector<JobSlice> partition_jobs(std::size_t n, std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("partition_jobs: batch_size must be >= 1");
  std::vector<JobSlice> slices;
  slices.reserve((n + batch_size - 1) / batch_size);
  for (std::size_t b = 0; b < n; b += batch_size)
    slices.push_back({b, std::min(n, b + batch_size)});
  return slices;
}

void dispatch_parallel(std::size_t n_jobs, int n_threads,
                       const std::function<void(std::size_t)>& run) {
  if (n_threads < 1) throw std::invalid_argument("dispatch: n_threads must be >= 1");
  if (n_jobs == 0) return;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_jobs);
  const std::size_t team = std::min<std::size_t>(n_threads, n_jobs);
  std::vector<std::thread> threads;
  threads.reserve(team);
  for (std::size_t t = 0; t < team; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= n_jobs) return;
        try {
          run(j);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

struct Endpoint {
  std::string host;
  int port = 0;
};

Endpoint parse_endpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon + 1 >= s.size())
    throw std::invalid_argument("endpoint must be host:port, got '" + s + "'");
  Endpoint e;
  e.host = s.substr(0, colon);
  e.port = std::stoi(s.substr(colon + 1));
  if (e.port <= 0 || e.port > 65535)
    throw std::invalid_argument("endpoint port out of range in '" + s + "'");
  return e;
}

}  // namespace

RemoteExecutor::RemoteExecutor(OffloadMode mode, RemoteConfig cfg,
                               const CrackPosterior& problem)
    : mode_(mode), cfg_(std::move(cfg)), problem_(problem) {
  if (cfg_.endpoints.empty())
    throw std::invalid_argument("remote executor requires at least one endpoint");
  if (cfg_.batch_size < 1) throw std::invalid_argument("remote: batch_size must be >= 1");
  if (cfg_.n_threads < 1) throw std::invalid_argument("remote: n_threads must be >= 1");
  for (const auto& e : cfg_.endpoints) parse_endpoint(e);  // validate early
  digest_ = wire::digest_hex(
      wire::problem_digest(problem_.observations(), problem_.law(), problem_.prior()));
}

void RemoteExecutor::check_workers() {
  for (const auto& ep : cfg_.endpoints) {
    const auto e = parse_endpoint(ep);
    httplib::Client cli(e.host, e.port);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(cfg_.request_timeout_s);
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < cfg_.retry.max_attempts && !ok; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.retry.backoff_base_ms << (attempt - 1)));
      auto res = cli.Get("/v1/health");
      if (!res) {
        last_error = "no response (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status != 200) {
        last_error = "status " + std::to_string(res->status);
        continue;
      }
      const auto h = wire::health_response_from_json(res->body);
      if (h.dataset_digest != digest_)
        throw std::runtime_error("worker " + ep + " holds dataset " + h.dataset_digest +
                                 ", coordinator has " + digest_);
      ok = true;
    }
    if (!ok)
      throw std::runtime_error("worker " + ep + " health check failed: " + last_error);
  }
  checked_ = true;
}

std::string RemoteExecutor::post_with_retry(std::size_t job_index, const std::string& path,
                                            const std::string& body,
                                            const std::string& job_id) const {
  std::string last_error;
  for (int attempt = 0; attempt < cfg_.retry.max_attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg_.retry.backoff_base_ms << (attempt - 1)));
    // Round-robin base assignment, advancing on retry for failover.
    const auto& ep =
        cfg_.endpoints[(job_index + attempt) % cfg_.endpoints.size()];
    const auto e = parse_endpoint(ep);
    httplib::Client cli(e.host, e.port);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(cfg_.request_timeout_s);
    cli.set_write_timeout(cfg_.request_timeout_s);
    auto res = cli.Post(path, body, "application/json");
    if (!res) {
      last_error = ep + ": no response (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 400 || res->status == 409)
      throw std::runtime_error("job " + job_id + " rejected by " + ep + " (" +
                               std::to_string(res->status) + "): " + res->body);
    last_error = ep + ": status " + std::to_string(res->status);
  }
  throw std::runtime_error("job " + job_id + " failed after " +
                           std::to_string(cfg_.retry.max_attempts) +
                           " attempts: " + last_error);
}

void RemoteExecutor::mutate(std::vector<Particle>& particles, const MutationContext& ctx,
                            MutationStats& stats) {
  if (!checked_) check_workers();
  if (mode_ == OffloadMode::kModelEval)
    mutate_model_eval(particles, ctx, stats);
  else
    mutate_full(particles, ctx, stats);
}

void RemoteExecutor::mutate_model_eval(std::vector<Particle>& particles,
                                       const MutationContext& ctx, MutationStats& stats) {
  std::vector<std::uint64_t> keys(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i)
    keys[i] = mutation_stream_key(ctx.master_seed, ctx.step_index, particles[i].id);

  std::atomic<std::uint64_t> round{0};
  const StatBatchFn remote_stat = [&](std::span<const ModelParams> batch,
                                      std::span<double> out) {
    const auto slices = partition_jobs(batch.size(), cfg_.batch_size);
    const std::uint64_t round_id = round.fetch_add(1);
    dispatch_parallel(slices.size(), cfg_.n_threads, [&](std::size_t s) {
      const auto& sl = slices[s];
      wire::ModelEvalRequest req;
      req.job_id = "eval-" + std::to_string(ctx.step_index) + "-" +
                   std::to_string(round_id) + "-" + std::to_string(s);
      req.dataset_digest = digest_;
      req.log10_alpha.reserve(sl.end - sl.begin);
      req.beta.reserve(sl.end - sl.begin);
      for (std::size_t i = sl.begin; i < sl.end; ++i) {
        req.log10_alpha.push_back(batch[i].log10_alpha);
        req.beta.push_back(batch[i].beta);
      }
      const auto body = post_with_retry(s, "/v1/model-eval", wire::to_json(req), req.job_id);
      const auto resp = wire::model_eval_response_from_json(body);
      if (resp.job_id != req.job_id)
        throw std::runtime_error("job " + req.job_id + ": response id mismatch");
      const std::size_t n = resp.n_points;
      if (resp.predictions.size() != (sl.end - sl.begin) * n)
        throw std::runtime_error("job " + req.job_id + ": prediction count mismatch");
      for (std::size_t i = sl.begin; i < sl.end; ++i)
        out[i] = problem_.stat_from_predictions(
            {resp.predictions.data() + (i - sl.begin) * n, n});
    });
  };

  mutate_block(particles, keys, ctx, problem_, remote_stat, stats);
}

void RemoteExecutor::mutate_full(std::vector<Particle>& particles,
                                 const MutationContext& ctx, MutationStats& stats) {
  const auto slices = partition_jobs(particles.size(), cfg_.batch_size);
  std::vector<MutationStats> slice_stats(slices.size());
  std::vector<std::uint8_t> seen(particles.size(), 0);

  dispatch_parallel(slices.size(), cfg_.n_threads, [&](std::size_t s) {
    const auto& sl = slices[s];
    const std::size_t k = sl.end - sl.begin;
    wire::MutateRequest req;
    req.job_id = "mutate-" + std::to_string(ctx.step_index) + "-" + std::to_string(s);
    req.dataset_digest = digest_;
    req.phi = ctx.phi;
    req.n_mcmc = ctx.n_mcmc;
    req.proposal_cov = ctx.proposal_cov;
    req.ids.reserve(k);
    req.stream_keys.reserve(k);
    for (std::size_t i = sl.begin; i < sl.end; ++i) {
      const auto& p = particles[i];
      req.ids.push_back(p.id);
      req.stream_keys.push_back(
          mutation_stream_key(ctx.master_seed, ctx.step_index, p.id));
      req.log10_alpha.push_back(p.params.log10_alpha);
      req.beta.push_back(p.params.beta);
      req.sigma.push_back(p.params.sigma);
    }
    const auto body = post_with_retry(s, "/v1/mutate", wire::to_json(req), req.job_id);
    const auto resp = wire::mutate_response_from_json(body);
    if (resp.job_id != req.job_id)
      throw std::runtime_error("job " + req.job_id + ": response id mismatch");
    if (resp.log10_alpha.size() != k)
      throw std::runtime_error("job " + req.job_id + ": block size mismatch");
    for (std::size_t i = 0; i < k; ++i) {
      auto& p = particles[sl.begin + i];
      if (seen[sl.begin + i]++)
        throw std::runtime_error("job " + req.job_id + ": duplicate particle result");
      p.params.log10_alpha = resp.log10_alpha[i];
      p.params.beta = resp.beta[i];
      p.params.sigma = resp.sigma[i];
      p.log_like = resp.log_like[i];
      slice_stats[s].accepted += resp.accept_counts[i];
    }
    slice_stats[s].proposed = static_cast<std::int64_t>(k) * ctx.n_mcmc;
  });

  for (std::size_t i = 0; i < particles.size(); ++i)
    if (!seen[i])
      throw std::runtime_error("mutation reassembly: particle " + std::to_string(i) +
                               " missing from results");
  for (const auto& s : slice_stats) {
    stats.accepted += s.accepted;
    stats.proposed += s.proposed;
  }
}

}  // namespace rulcast
