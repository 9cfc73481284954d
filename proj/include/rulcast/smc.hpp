#ifndef RULCAST_SMC_HPP
#define RULCAST_SMC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/mat2.hpp"
#include "rulcast/mutation.hpp"
#include "rulcast/posterior.hpp"
#include "rulcast/smc_types.hpp"

namespace rulcast {

struct SmcConfig {
  std::size_t n_particles = 1024;
  int n_mcmc = 5;                       // mutation steps per particle per tempering step
  double ess_target_frac = 0.5;          // kappa: adaptive delta-phi targets kappa*N
  double resample_threshold_frac = 1.0;  // resample when ESS <= frac*N; 1.0 = always
  double phi_bisect_tol = 1e-3;          // |ESS - kappa*N| tolerance, as a fraction of N
  double adapt_scale = 2.88;             // proposal covariance scale, (2.4)^2 / d
  double cov_jitter = 1e-10;
  std::uint64_t seed = 1;
  int max_temper_steps = 10000;  // runaway guard; never reached in practice
};

void validate_config(const SmcConfig& cfg);

// N particles drawn independently from the prior, equal log-weights, phi = 0.
ParticleEnsemble init_ensemble(const SmcConfig& cfg, const TargetDensity& target);

// 1 / sum(w_i^2) over normalized weights, via log-sum-exp.
double ess_from_log_weights(std::span<const double> log_weights);
double ess(const ParticleEnsemble& ens);

// Next tempering exponent: the phi' in (phi, 1] at which the ESS of the
// incremental weights exp((phi' - phi) * log_like_i) matches
// ess_target_frac * N, found by bisection; phi' = 1 if even the full step
// keeps the ESS above target.
double adapt_delta_phi(const ParticleEnsemble& ens, const SmcConfig& cfg);

// log_weight_i += (phi_new - phi) * log_like_i, then normalize. Throws on
// total degeneracy (all weights zero).
void reweight(ParticleEnsemble& ens, double phi_new);

// Systematic resampling: one uniform offset, stride 1/N over the cumulative
// weights. Offspring inherit params and log_like; weights reset to uniform;
// ids reassigned 0..N-1.
void resample_systematic(ParticleEnsemble& ens, RngStream& rng);
// Deterministic-offset variant backing the count-bound property tests.
void resample_systematic_offset(ParticleEnsemble& ens, double offset01);

// Weighted sample covariance of the (log10_alpha, beta) block.
Mat2Sym weighted_param_covariance(const ParticleEnsemble& ens);

// Mutation dispatch for one tempering step (proposal covariance from the
// pre-mutation ensemble, scaled and jittered per config).
void mutate(ParticleEnsemble& ens, const SmcConfig& cfg, const TargetDensity& target,
            MutationExecutor& executor, MutationStats& stats);

struct SmcStepDiag {
  std::int64_t step = 0;
  double phi = 0.0;
  double ess_after_reweight = 0.0;
  bool resampled = false;
  double accept_rate = 0.0;  // of this step's mutation proposals
  double mutate_ms = 0.0;
};

struct SmcResult {
  PosteriorSamples samples;
  std::vector<SmcStepDiag> schedule;
  double wall_ms = 0.0;
  double mutate_ms = 0.0;  // total time inside the mutation stages
};

// Full tempering sweep: {adapt delta-phi, reweight, resample, mutate} from
// phi = 0 until phi = 1; draws are the final particle set (equal weights).
SmcResult run_smc(const SmcConfig& cfg, const TargetDensity& target,
                  MutationExecutor& executor);

}  // namespace rulcast

#endif
