#ifndef RULCAST_MCMC_HPP
#define RULCAST_MCMC_HPP

#include <cstdint>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/mat2.hpp"
#include "rulcast/posterior.hpp"
#include "rulcast/rng.hpp"

namespace rulcast {

struct McmcConfig {
  std::int64_t n_samples = 50000;
  std::int64_t n_burn = 20000;
  std::int64_t thin = 5;
  ModelParams init{};  // chain start; callers typically use the least-squares fit
  Mat2Sym init_cov{0.01, 0.0, 0.01};
  std::int64_t adapt_start = 1000;     // iteration at which adaptation kicks in
  double adapt_scale = 2.88;           // (2.4)^2 / d for d = 2
  double cov_jitter = 1e-10;           // keeps the adapted proposal SPD
  std::uint64_t seed = 1;
};

void validate_config(const McmcConfig& cfg);

// Random-walk proposal on the (log10_alpha, beta) block; sigma untouched.
// Consumes one Box-Muller pair.
ModelParams propose(const ModelParams& current, const Chol2& chol, RngStream& rng);

// Accept iff r = exp(tempered log-density difference) strictly exceeds a
// fresh U[0,1) draw. Always consumes the uniform so stream consumption is
// call-count deterministic.
bool mh_accept(double lp_cur, double ll_cur, double lp_prop, double ll_prop, double phi,
               RngStream& rng);

// One Metropolis decision against a tempered target; sigma is not perturbed
// here (see gibbs_sigma).
struct StepResult {
  ModelParams params;
  bool accepted = false;
};
StepResult mcmc_step(const ModelParams& current, const Mat2Sym& cov,
                     const TemperedPosterior& target, RngStream& rng);

// Conjugate draw of sigma^2 from IG(shape + n/2, scale + SS_q/2).
ModelParams gibbs_sigma(const ModelParams& current, const ObservationSeries& obs,
                        const GrowthLaw& law, const PriorSpec& prior, RngStream& rng);

// Running mean/covariance of the (log10_alpha, beta) chain for Haario-style
// adaptation.
class RunningCov2 {
 public:
  void add(double x, double y);
  std::int64_t count() const { return n_; }
  Mat2Sym covariance() const;  // population covariance

 private:
  std::int64_t n_ = 0;
  double mx_ = 0.0, my_ = 0.0;
  double sxx_ = 0.0, sxy_ = 0.0, syy_ = 0.0;
};

struct McmcResult {
  PosteriorSamples samples;
  std::vector<double> window_accept;  // acceptance per 1000-iteration window
  double wall_ms = 0.0;
};

// Serial adaptive-Metropolis chain: each iteration is one mcmc_step followed
// by one sigma update; burn-in discarded, every thin-th draw retained.
McmcResult run_mcmc(const McmcConfig& cfg, const TargetDensity& target);

}  // namespace rulcast

#endif
