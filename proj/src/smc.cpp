#include "rulcast/smc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rulcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void validate_config(const SmcConfig& cfg) {
  if (cfg.n_particles < 2) throw std::invalid_argument("smc: need at least 2 particles");
  if (cfg.n_mcmc < 0) throw std::invalid_argument("smc: n_mcmc must be >= 0");
  if (!(cfg.ess_target_frac > 0.0) || !(cfg.ess_target_frac < 1.0))
    throw std::invalid_argument("smc: ess_target_frac must be in (0, 1)");
  if (!(cfg.resample_threshold_frac >= 0.0) || !(cfg.resample_threshold_frac <= 1.0))
    throw std::invalid_argument("smc: resample_threshold_frac must be in [0, 1]");
  if (!(cfg.phi_bisect_tol > 0.0)) throw std::invalid_argument("smc: phi_bisect_tol must be > 0");
}

ParticleEnsemble init_ensemble(const SmcConfig& cfg, const TargetDensity& target) {
  validate_config(cfg);
  ParticleEnsemble ens;
  ens.seed = cfg.seed;
  ens.phi = 0.0;
  ens.step_index = 0;
  ens.particles.resize(cfg.n_particles);

  const double lw = -std::log(static_cast<double>(cfg.n_particles));
  std::vector<ModelParams> params(cfg.n_particles);
  for (std::size_t i = 0; i < cfg.n_particles; ++i) {
    RngStream rng(stream_key({cfg.seed, stage::kInit, i}));
    params[i] = target.draw_prior(rng);
  }
  std::vector<double> stat(cfg.n_particles);
  target.sufficient_stat_batch(params, stat);
  for (std::size_t i = 0; i < cfg.n_particles; ++i) {
    auto& p = ens.particles[i];
    p.params = params[i];
    p.log_weight = lw;
    p.log_like = target.log_like_from_stat(stat[i], params[i]);
    p.id = static_cast<std::uint32_t>(i);
  }
  return ens;
}

double ess_from_log_weights(std::span<const double> log_weights) {
  std::vector<double> doubled(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) doubled[i] = 2.0 * log_weights[i];
  const double lse1 = log_sum_exp(log_weights);
  const double lse2 = log_sum_exp(doubled);
  if (lse1 == kNegInf) throw std::runtime_error("ess: all weights zero");
  return std::exp(2.0 * lse1 - lse2);
}

double ess(const ParticleEnsemble& ens) {
  std::vector<double> lw(ens.size());
  for (std::size_t i = 0; i < ens.size(); ++i) lw[i] = ens.particles[i].log_weight;
  return ess_from_log_weights(lw);
}

double adapt_delta_phi(const ParticleEnsemble& ens, const SmcConfig& cfg) {
  if (!(ens.phi < 1.0)) throw std::invalid_argument("adapt_delta_phi: phi already 1");
  const std::size_t n = ens.size();
  std::vector<double> ll(n);
  for (std::size_t i = 0; i < n; ++i) ll[i] = ens.particles[i].log_like;

  std::vector<double> inc(n);
  const auto ess_at = [&](double dphi) {
    for (std::size_t i = 0; i < n; ++i) inc[i] = dphi * ll[i];
    return ess_from_log_weights(inc);
  };

  const double target_ess = cfg.ess_target_frac * static_cast<double>(n);
  const double tol = cfg.phi_bisect_tol * static_cast<double>(n);
  const double full = 1.0 - ens.phi;
  if (ess_at(full) >= target_ess) return 1.0;

  double lo = 0.0, hi = full;  // ESS(lo) = N > target > ESS(hi)
  double mid = 0.5 * full;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double e = ess_at(mid);
    if (std::abs(e - target_ess) <= tol) break;
    if (e > target_ess)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  double phi_new = ens.phi + mid;
  if (!(phi_new > ens.phi)) phi_new = std::nextafter(ens.phi, 1.0);
  return std::min(phi_new, 1.0);
}

void reweight(ParticleEnsemble& ens, double phi_new) {
  if (!(phi_new >= ens.phi))
    throw std::invalid_argument("reweight: phi must not decrease");
  const double dphi = phi_new - ens.phi;
  std::vector<double> lw(ens.size());
  for (std::size_t i = 0; i < ens.size(); ++i) {
    auto& p = ens.particles[i];
    p.log_weight += dphi * p.log_like;
    lw[i] = p.log_weight;
  }
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf || !std::isfinite(lse))
    throw std::runtime_error("reweight: ensemble degenerate (all weights zero)");
  for (auto& p : ens.particles) p.log_weight -= lse;
  ens.phi = phi_new;
}

namespace {

void resample_with_offset(ParticleEnsemble& ens, double u) {
  const std::size_t n = ens.size();
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(ens.particles[i].log_weight);
    total += w[i];
  }
  std::vector<Particle> offspring;
  offspring.reserve(n);
  double cum = w[0];
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pos = total * (u + static_cast<double>(k)) / static_cast<double>(n);
    while (pos >= cum && j + 1 < n) cum += w[++j];
    offspring.push_back(ens.particles[j]);
  }
  const double lw = -std::log(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    offspring[i].log_weight = lw;
    offspring[i].id = static_cast<std::uint32_t>(i);
  }
  ens.particles = std::move(offspring);
}

}  // namespace

void resample_systematic(ParticleEnsemble& ens, RngStream& rng) {
  resample_with_offset(ens, rng.uniform01());
}

void resample_systematic_offset(ParticleEnsemble& ens, double offset01) {
  if (!(offset01 >= 0.0) || !(offset01 < 1.0))
    throw std::invalid_argument("resample: offset must be in [0, 1)");
  resample_with_offset(ens, offset01);
}

Mat2Sym weighted_param_covariance(const ParticleEnsemble& ens) {
  double wsum = 0.0, mx = 0.0, my = 0.0;
  for (const auto& p : ens.particles) {
    const double w = std::exp(p.log_weight);
    wsum += w;
    mx += w * p.params.log10_alpha;
    my += w * p.params.beta;
  }
  mx /= wsum;
  my /= wsum;
  Mat2Sym cov;
  for (const auto& p : ens.particles) {
    const double w = std::exp(p.log_weight);
    const double dx = p.params.log10_alpha - mx;
    const double dy = p.params.beta - my;
    cov.m00 += w * dx * dx;
    cov.m01 += w * dx * dy;
    cov.m11 += w * dy * dy;
  }
  cov.m00 /= wsum;
  cov.m01 /= wsum;
  cov.m11 /= wsum;
  return cov;
}

void mutate(ParticleEnsemble& ens, const SmcConfig& cfg, const TargetDensity& target,
            MutationExecutor& executor, MutationStats& stats) {
  (void)target;  // executors are pre-bound to the target; kept for symmetry
  MutationContext ctx;
  ctx.phi = ens.phi;
  ctx.n_mcmc = cfg.n_mcmc;
  Mat2Sym cov = add_jitter(weighted_param_covariance(ens), cfg.cov_jitter);
  cov.m00 *= cfg.adapt_scale;
  cov.m01 *= cfg.adapt_scale;
  cov.m11 *= cfg.adapt_scale;
  ctx.proposal_cov = cov;
  ctx.master_seed = ens.seed;
  ctx.step_index = ens.step_index;
  executor.mutate(ens.particles, ctx, stats);
}

SmcResult run_smc(const SmcConfig& cfg, const TargetDensity& target,
                  MutationExecutor& executor) {
  const auto t0 = std::chrono::steady_clock::now();
  SmcResult res;
  ParticleEnsemble ens = init_ensemble(cfg, target);

  std::int64_t total_accepted = 0, total_proposed = 0;
  while (ens.phi < 1.0) {
    ens.step_index += 1;
    if (ens.step_index > cfg.max_temper_steps)
      throw std::runtime_error("run_smc: tempering failed to reach phi = 1");

    const double phi_new = adapt_delta_phi(ens, cfg);
    reweight(ens, phi_new);

    SmcStepDiag diag;
    diag.step = ens.step_index;
    diag.phi = ens.phi;
    diag.ess_after_reweight = ess(ens);

    diag.resampled = diag.ess_after_reweight <=
                     cfg.resample_threshold_frac * static_cast<double>(ens.size());
    if (diag.resampled) {
      RngStream rng(stream_key({cfg.seed, stage::kResample,
                                static_cast<std::uint64_t>(ens.step_index)}));
      resample_systematic(ens, rng);
    }

    MutationStats stats;
    const auto m0 = std::chrono::steady_clock::now();
    mutate(ens, cfg, target, executor, stats);
    diag.mutate_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - m0)
                         .count();
    res.mutate_ms += diag.mutate_ms;
    diag.accept_rate = stats.proposed > 0
                           ? static_cast<double>(stats.accepted) /
                                 static_cast<double>(stats.proposed)
                           : 0.0;
    total_accepted += stats.accepted;
    total_proposed += stats.proposed;
    res.schedule.push_back(diag);
  }

  // Draws must be equally weighted: if the last step skipped resampling
  // (possible only with resample_threshold_frac < 1), resample once at phi=1.
  if (!res.schedule.empty() && !res.schedule.back().resampled) {
    RngStream rng(stream_key({cfg.seed, stage::kResample,
                              static_cast<std::uint64_t>(ens.step_index + 1)}));
    resample_systematic(ens, rng);
  }

  res.samples.sampler = SamplerTag::kSmc;
  res.samples.seed = cfg.seed;
  res.samples.acceptance_rate =
      total_proposed > 0
          ? static_cast<double>(total_accepted) / static_cast<double>(total_proposed)
          : 0.0;
  res.samples.draws.reserve(ens.size());
  for (const auto& p : ens.particles) res.samples.draws.push_back(p.params);
  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace rulcast
