#include "rulcast/bayes.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rulcast {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.8378770664093454836;
}  // namespace

void validate_observations(const ObservationSeries& obs) {
  if (obs.cycles.size() != obs.lengths_mm.size())
    throw std::invalid_argument("observations: cycle/length cardinality mismatch");
  if (obs.size() < 2) throw std::invalid_argument("observations: need at least 2 points");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs.cycles[i] < 0) throw std::invalid_argument("observations: negative cycle");
    if (i > 0 && obs.cycles[i] <= obs.cycles[i - 1])
      throw std::invalid_argument("observations: cycles must be strictly increasing");
    if (!(obs.lengths_mm[i] > 0.0) || !std::isfinite(obs.lengths_mm[i]))
      throw std::invalid_argument("observations: lengths must be positive and finite");
  }
}

void validate_prior(const PriorSpec& prior) {
  if (!(prior.log10_alpha.lo < prior.log10_alpha.hi) || !(prior.beta.lo < prior.beta.hi))
    throw std::invalid_argument("prior: box bounds require lo < hi");
  if (!(prior.sigma_sq_shape > 0.0) || !(prior.sigma_sq_scale > 0.0))
    throw std::invalid_argument("prior: inverse-gamma hyperparameters must be positive");
}

double sum_squares(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size())
    throw std::invalid_argument("sum_squares: size mismatch");
  double ss = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double r = observed[i] - predicted[i];
    ss += r * r;
  }
  return ss;
}

double sum_squares(const ModelParams& p, const ObservationSeries& obs, const GrowthLaw& law) {
  const auto traj = predict_crack(p, law, obs.cycles);
  return sum_squares(obs.lengths_mm, traj.lengths_mm);
}

double log_likelihood_from_ss(double ss, double sigma, std::size_t n) {
  if (!(sigma > 0.0)) throw std::invalid_argument("log_likelihood: sigma must be > 0");
  const double s2 = sigma * sigma;
  return -0.5 * static_cast<double>(n) * (kLn2Pi + std::log(s2)) - ss / (2.0 * s2);
}

double log_likelihood(const ModelParams& p, const ObservationSeries& obs, const GrowthLaw& law) {
  return log_likelihood_from_ss(sum_squares(p, obs, law), p.sigma, obs.size());
}

double log_inv_gamma_density(double x, double shape, double scale) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

double log_prior(const ModelParams& p, const PriorSpec& prior) {
  if (p.log10_alpha < prior.log10_alpha.lo || p.log10_alpha > prior.log10_alpha.hi)
    return kNegInf;
  if (p.beta < prior.beta.lo || p.beta > prior.beta.hi) return kNegInf;
  if (!(p.sigma > 0.0)) return kNegInf;
  double lp = -std::log(prior.log10_alpha.hi - prior.log10_alpha.lo) -
              std::log(prior.beta.hi - prior.beta.lo);
  lp += log_inv_gamma_density(p.sigma * p.sigma, prior.sigma_sq_shape, prior.sigma_sq_scale);
  return lp;
}

SigmaConditional sigma_conditional(const PriorSpec& prior, std::size_t n, double ss,
                                   double phi) {
  return {prior.sigma_sq_shape + 0.5 * phi * static_cast<double>(n),
          prior.sigma_sq_scale + 0.5 * phi * ss};
}

void apply_eval_cost(const EvalCost& cost) {
  if (cost.mode == EvalCost::Mode::kNone || cost.micros <= 0.0) return;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double, std::micro>(cost.micros));
  if (cost.mode == EvalCost::Mode::kBusy) {
    volatile double sink = 0.0;
    while (std::chrono::steady_clock::now() < deadline) {
      for (int i = 0; i < 64; ++i) sink = sink + 1e-9;
    }
  } else {
    while (std::chrono::steady_clock::now() < deadline)
      std::this_thread::yield();
  }
}

void TargetDensity::sufficient_stat_batch(std::span<const ModelParams> batch,
                                          std::span<double> out) const {
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = sufficient_stat(batch[i]);
}

double TemperedPosterior::log_density(const ModelParams& p) const {
  const double lp = target->log_prior(p);
  if (lp == kNegInf) return kNegInf;
  if (phi == 0.0) return lp;
  return lp + phi * target->log_likelihood(p);
}

CrackPosterior::CrackPosterior(ObservationSeries obs, PriorSpec prior, GrowthLaw law)
    : obs_(std::move(obs)), prior_(prior), law_(law) {
  validate_observations(obs_);
  validate_prior(prior_);
  validate_law(law_);
}

double CrackPosterior::log_prior(const ModelParams& p) const {
  return rulcast::log_prior(p, prior_);
}

void CrackPosterior::predictions_batch(std::span<const ModelParams> batch,
                                       double* out) const {
  predict_lengths_batch(batch, law_, obs_.cycles, out);
  for (std::size_t i = 0; i < batch.size(); ++i) apply_eval_cost(cost_);
}

double CrackPosterior::stat_from_predictions(std::span<const double> predictions) const {
  return sum_squares(obs_.lengths_mm, predictions);
}

double CrackPosterior::sufficient_stat(const ModelParams& p) const {
  std::vector<double> pred(obs_.size());
  predictions_batch({&p, 1}, pred.data());
  return stat_from_predictions(pred);
}

void CrackPosterior::sufficient_stat_batch(std::span<const ModelParams> batch,
                                           std::span<double> out) const {
  const std::size_t n = obs_.size();
  std::vector<double> pred(batch.size() * n);
  predictions_batch(batch, pred.data());
  for (std::size_t i = 0; i < batch.size(); ++i)
    out[i] = stat_from_predictions({pred.data() + i * n, n});
}

double CrackPosterior::log_like_from_stat(double ss, const ModelParams& p) const {
  return log_likelihood_from_ss(ss, p.sigma, obs_.size());
}

ModelParams CrackPosterior::draw_prior(RngStream& rng) const {
  ModelParams p;
  p.log10_alpha = prior_.log10_alpha.lo +
                  (prior_.log10_alpha.hi - prior_.log10_alpha.lo) * rng.uniform01();
  p.beta = prior_.beta.lo + (prior_.beta.hi - prior_.beta.lo) * rng.uniform01();
  p.sigma = std::sqrt(rng.inv_gamma(prior_.sigma_sq_shape, prior_.sigma_sq_scale));
  return p;
}

ModelParams CrackPosterior::update_sigma(const ModelParams& p, double ss, double phi,
                                         RngStream& rng) const {
  const auto cond = sigma_conditional(prior_, obs_.size(), ss, phi);
  ModelParams out = p;
  out.sigma = std::sqrt(rng.inv_gamma(cond.shape, cond.scale));
  return out;
}

}  // namespace rulcast
