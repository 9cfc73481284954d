#include "rulcast/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rulcast {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void validate_config(const McmcConfig& cfg) {
  if (cfg.n_samples <= 0) throw std::invalid_argument("mcmc: n_samples must be positive");
  if (cfg.n_burn < 0 || cfg.n_burn >= cfg.n_samples)
    throw std::invalid_argument("mcmc: requires 0 <= n_burn < n_samples");
  if (cfg.thin < 1) throw std::invalid_argument("mcmc: thin must be >= 1");
  if (!(cfg.init_cov.m00 >= 0.0) || !(cfg.init_cov.m11 >= 0.0))
    throw std::invalid_argument("mcmc: init_cov diagonal must be non-negative");
}

ModelParams propose(const ModelParams& current, const Chol2& chol, RngStream& rng) {
  const auto [z0, z1] = rng.normal_pair();
  ModelParams q = current;
  q.log10_alpha += chol.l00 * z0;
  q.beta += chol.l10 * z0 + chol.l11 * z1;
  return q;
}

bool mh_accept(double lp_cur, double ll_cur, double lp_prop, double ll_prop, double phi,
               RngStream& rng) {
  double log_r;
  if (lp_prop == kNegInf) {
    log_r = kNegInf;
  } else {
    // phi * (-inf) would be NaN at phi = 0; outside-support proposals are
    // already handled above, and inside support ll is finite.
    log_r = (lp_prop - lp_cur) + (phi == 0.0 ? 0.0 : phi * (ll_prop - ll_cur));
  }
  const double u = rng.uniform01();
  return std::exp(log_r) > u;
}

StepResult mcmc_step(const ModelParams& current, const Mat2Sym& cov,
                     const TemperedPosterior& target, RngStream& rng) {
  const Chol2 chol = cholesky(cov);
  const ModelParams prop = propose(current, chol, rng);
  const double lp_cur = target.target->log_prior(current);
  const double ll_cur =
      target.phi == 0.0 ? 0.0 : target.target->log_likelihood(current);
  const double lp_prop = target.target->log_prior(prop);
  const double ll_prop = (target.phi == 0.0 || lp_prop == kNegInf)
                             ? 0.0
                             : target.target->log_likelihood(prop);
  if (mh_accept(lp_cur, ll_cur, lp_prop, ll_prop, target.phi, rng))
    return {prop, true};
  return {current, false};
}

ModelParams gibbs_sigma(const ModelParams& current, const ObservationSeries& obs,
                        const GrowthLaw& law, const PriorSpec& prior, RngStream& rng) {
  const double ss = sum_squares(current, obs, law);
  const auto cond = sigma_conditional(prior, obs.size(), ss, 1.0);
  ModelParams out = current;
  out.sigma = std::sqrt(rng.inv_gamma(cond.shape, cond.scale));
  return out;
}

void RunningCov2::add(double x, double y) {
  // Welford, bivariate.
  ++n_;
  const double dx = x - mx_;
  const double dy = y - my_;
  mx_ += dx / static_cast<double>(n_);
  my_ += dy / static_cast<double>(n_);
  sxx_ += dx * (x - mx_);
  sxy_ += dx * (y - my_);
  syy_ += dy * (y - my_);
}

Mat2Sym RunningCov2::covariance() const {
  if (n_ < 2) return {0.0, 0.0, 0.0};
  const double n = static_cast<double>(n_);
  return {sxx_ / n, sxy_ / n, syy_ / n};
}

McmcResult run_mcmc(const McmcConfig& cfg, const TargetDensity& target) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  RngStream rng(stream_key({cfg.seed, stage::kChain}));
  ModelParams params = cfg.init;

  double lp = target.log_prior(params);
  if (lp == kNegInf)
    throw std::invalid_argument("run_mcmc: init point outside prior support");
  double stat = target.sufficient_stat(params);
  double ll = target.log_like_from_stat(stat, params);
  if (!std::isfinite(ll))
    throw std::invalid_argument("run_mcmc: non-finite target at init");

  Mat2Sym cov = cfg.init_cov;
  Chol2 chol = cholesky(cov);
  RunningCov2 running;
  running.add(params.log10_alpha, params.beta);

  McmcResult res;
  res.samples.sampler = SamplerTag::kMcmc;
  res.samples.seed = cfg.seed;
  res.samples.draws.reserve(
      static_cast<std::size_t>((cfg.n_samples - cfg.n_burn + cfg.thin - 1) / cfg.thin));

  std::int64_t accepted = 0;
  std::int64_t window_accepted = 0;
  for (std::int64_t iter = 0; iter < cfg.n_samples; ++iter) {
    const ModelParams prop = propose(params, chol, rng);
    const double lp_prop = target.log_prior(prop);
    double stat_prop = 0.0, ll_prop = 0.0;
    if (lp_prop != kNegInf) {
      stat_prop = target.sufficient_stat(prop);
      ll_prop = target.log_like_from_stat(stat_prop, prop);
    }
    if (mh_accept(lp, ll, lp_prop, ll_prop, 1.0, rng)) {
      params = prop;
      lp = lp_prop;
      stat = stat_prop;
      ll = ll_prop;
      ++accepted;
      ++window_accepted;
    }

    const ModelParams updated = target.update_sigma(params, stat, 1.0, rng);
    if (updated.sigma != params.sigma) {
      params = updated;
      lp = target.log_prior(params);
      ll = target.log_like_from_stat(stat, params);
    }

    running.add(params.log10_alpha, params.beta);
    if (iter + 1 >= cfg.adapt_start) {
      cov = add_jitter(running.covariance(), cfg.cov_jitter);
      cov.m00 *= cfg.adapt_scale;
      cov.m01 *= cfg.adapt_scale;
      cov.m11 *= cfg.adapt_scale;
      chol = cholesky(cov);
    }

    if (iter >= cfg.n_burn && (iter - cfg.n_burn) % cfg.thin == 0)
      res.samples.draws.push_back(params);
    if ((iter + 1) % 1000 == 0) {
      res.window_accept.push_back(static_cast<double>(window_accepted) / 1000.0);
      window_accepted = 0;
    }
  }

  res.samples.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
  res.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

}  // namespace rulcast
