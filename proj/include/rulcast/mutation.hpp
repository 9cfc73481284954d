#ifndef RULCAST_MUTATION_HPP
#define RULCAST_MUTATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/mat2.hpp"
#include "rulcast/smc_types.hpp"

namespace rulcast {

// Everything a mutation round needs besides the particles themselves. The
// proposal covariance is computed by the coordinator from the pre-mutation
// ensemble and shipped with the job in remote modes.
struct MutationContext {
  double phi = 0.0;
  int n_mcmc = 5;
  Mat2Sym proposal_cov{};
  std::uint64_t master_seed = 0;
  std::int64_t step_index = 0;
};

struct MutationStats {
  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
};

// Per-task stream key: (master seed, mutate stage, tempering step, particle
// id). No RNG state is shared between particles, so any partition or
// scheduling of the work produces identical draws.
std::uint64_t mutation_stream_key(std::uint64_t master_seed, std::int64_t step_index,
                                  std::uint32_t particle_id);

// Batched sufficient-statistic evaluation; local vectorized or remote.
using StatBatchFn =
    std::function<void(std::span<const ModelParams>, std::span<double>)>;

// Mutates a block of particles in lockstep: one statistic refresh, then
// n_mcmc propose/evaluate/accept rounds, then one sigma update, all drawing
// from per-particle streams. Per-particle arithmetic is independent of the
// block partition and of where the statistics are evaluated, which is what
// makes serial, threaded and remote execution bit-identical.
// accept_counts, when non-null, receives per-particle acceptance tallies
// (block.size() entries).
void mutate_block(std::span<Particle> block, std::span<const std::uint64_t> stream_keys,
                  const MutationContext& ctx, const TargetDensity& target,
                  const StatBatchFn& stat_fn, MutationStats& stats,
                  std::int64_t* accept_counts = nullptr);

// How mutation work is executed; see also RemoteExecutor in remote.hpp.
class MutationExecutor {
 public:
  virtual ~MutationExecutor() = default;
  virtual void mutate(std::vector<Particle>& particles, const MutationContext& ctx,
                      MutationStats& stats) = 0;
  virtual const char* mode_name() const = 0;
};

class SerialExecutor final : public MutationExecutor {
 public:
  explicit SerialExecutor(const TargetDensity& target) : target_(target) {}
  void mutate(std::vector<Particle>& particles, const MutationContext& ctx,
              MutationStats& stats) override;
  const char* mode_name() const override { return "serial"; }

 private:
  const TargetDensity& target_;
};

// Splits the ensemble into contiguous blocks across a fixed-size thread team.
class ThreadedExecutor final : public MutationExecutor {
 public:
  ThreadedExecutor(const TargetDensity& target, int n_threads);
  void mutate(std::vector<Particle>& particles, const MutationContext& ctx,
              MutationStats& stats) override;
  const char* mode_name() const override { return "threaded"; }

 private:
  const TargetDensity& target_;
  int n_threads_;
};

}  // namespace rulcast

#endif
