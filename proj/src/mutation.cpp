#include "rulcast/mutation.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "rulcast/mcmc.hpp"

namespace rulcast {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::uint64_t mutation_stream_key(std::uint64_t master_seed, std::int64_t step_index,
                                  std::uint32_t particle_id) {
  return stream_key({master_seed, stage::kMutate,
                     static_cast<std::uint64_t>(step_index), particle_id});
}

void mutate_block(std::span<Particle> block, std::span<const std::uint64_t> stream_keys,
                  const MutationContext& ctx, const TargetDensity& target,
                  const StatBatchFn& stat_fn, MutationStats& stats,
                  std::int64_t* accept_counts) {
  const std::size_t k = block.size();
  if (k == 0) return;
  if (stream_keys.size() != k)
    throw std::invalid_argument("mutate_block: one stream key per particle required");

  const Chol2 chol = cholesky(ctx.proposal_cov);

  std::vector<RngStream> streams;
  streams.reserve(k);
  for (std::size_t i = 0; i < k; ++i) streams.emplace_back(stream_keys[i]);

  std::vector<ModelParams> params(k);
  for (std::size_t i = 0; i < k; ++i) params[i] = block[i].params;

  // Refresh the sufficient statistic at the current points. Done every round
  // in every executor mode, so cached state never has to cross the wire.
  std::vector<double> stat(k), lp(k), ll(k);
  stat_fn(params, stat);
  for (std::size_t i = 0; i < k; ++i) {
    lp[i] = target.log_prior(params[i]);
    ll[i] = target.log_like_from_stat(stat[i], params[i]);
  }

  std::vector<ModelParams> proposals(k);
  std::vector<double> stat_prop(k), lp_prop(k);
  for (int step = 0; step < ctx.n_mcmc; ++step) {
    for (std::size_t i = 0; i < k; ++i)
      proposals[i] = propose(params[i], chol, streams[i]);
    stat_fn(proposals, stat_prop);
    for (std::size_t i = 0; i < k; ++i) {
      lp_prop[i] = target.log_prior(proposals[i]);
      const double ll_prop = lp_prop[i] == kNegInf
                                 ? 0.0
                                 : target.log_like_from_stat(stat_prop[i], proposals[i]);
      ++stats.proposed;
      if (mh_accept(lp[i], ll[i], lp_prop[i], ll_prop, ctx.phi, streams[i])) {
        params[i] = proposals[i];
        lp[i] = lp_prop[i];
        stat[i] = stat_prop[i];
        ll[i] = ll_prop;
        ++stats.accepted;
        if (accept_counts) ++accept_counts[i];
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    params[i] = target.update_sigma(params[i], stat[i], ctx.phi, streams[i]);
    block[i].params = params[i];
    block[i].log_like = target.log_like_from_stat(stat[i], params[i]);
  }
}

namespace {

StatBatchFn local_stat_fn(const TargetDensity& target) {
  return [&target](std::span<const ModelParams> batch, std::span<double> out) {
    target.sufficient_stat_batch(batch, out);
  };
}

std::vector<std::uint64_t> keys_for(std::span<const Particle> particles,
                                    const MutationContext& ctx) {
  std::vector<std::uint64_t> keys(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i)
    keys[i] = mutation_stream_key(ctx.master_seed, ctx.step_index, particles[i].id);
  return keys;
}

}  // namespace

void SerialExecutor::mutate(std::vector<Particle>& particles, const MutationContext& ctx,
                            MutationStats& stats) {
  const auto keys = keys_for(particles, ctx);
  mutate_block(particles, keys, ctx, target_, local_stat_fn(target_), stats);
}

ThreadedExecutor::ThreadedExecutor(const TargetDensity& target, int n_threads)
    : target_(target), n_threads_(n_threads) {
  if (n_threads < 1) throw std::invalid_argument("ThreadedExecutor: n_threads must be >= 1");
}

void ThreadedExecutor::mutate(std::vector<Particle>& particles, const MutationContext& ctx,
                              MutationStats& stats) {
  const auto keys = keys_for(particles, ctx);
  const std::size_t n = particles.size();
  const std::size_t n_blocks = std::min<std::size_t>(n_threads_, std::max<std::size_t>(n, 1));
  std::vector<MutationStats> block_stats(n_blocks);
  std::vector<std::exception_ptr> errors(n_blocks);
  std::vector<std::thread> team;
  team.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t lo = n * b / n_blocks;
    const std::size_t hi = n * (b + 1) / n_blocks;
    team.emplace_back([&, b, lo, hi] {
      try {
        MutationStats local;
        mutate_block({particles.data() + lo, hi - lo},
                     {keys.data() + lo, hi - lo}, ctx, target_,
                     local_stat_fn(target_), local);
        block_stats[b] = local;
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : team) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& s : block_stats) {
    stats.accepted += s.accepted;
    stats.proposed += s.proposed;
  }
}

}  // namespace rulcast
