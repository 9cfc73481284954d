#ifndef RULCAST_BAYES_HPP
#define RULCAST_BAYES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rulcast/damage.hpp"
#include "rulcast/rng.hpp"

namespace rulcast {

// Experimental (cycle, crack length) pairs.
struct ObservationSeries {
  std::vector<std::int64_t> cycles;
  std::vector<double> lengths_mm;
  std::size_t size() const { return cycles.size(); }
};

// Throws std::invalid_argument unless n >= 2, cycles strictly increasing and
// non-negative, lengths positive.
void validate_observations(const ObservationSeries& obs);

struct BoxBounds {
  double lo = 0.0;
  double hi = 1.0;
};

// Independent box-uniforms on (log10_alpha, beta); inverse-gamma on sigma^2.
struct PriorSpec {
  BoxBounds log10_alpha{-8.0, -1.0};
  BoxBounds beta{0.0, 4.0};
  double sigma_sq_shape = 0.01;
  double sigma_sq_scale = 0.01;
};

void validate_prior(const PriorSpec& prior);

// SS_q = sum_i (observed_i - predicted_i)^2
double sum_squares(std::span<const double> observed, std::span<const double> predicted);
double sum_squares(const ModelParams& p, const ObservationSeries& obs, const GrowthLaw& law);

// Gaussian iid log-likelihood: -(n/2) ln(2 pi sigma^2) - ss / (2 sigma^2).
double log_likelihood_from_ss(double ss, double sigma, std::size_t n);
double log_likelihood(const ModelParams& p, const ObservationSeries& obs, const GrowthLaw& law);

// log density of inverse-gamma(shape, scale) at x.
double log_inv_gamma_density(double x, double shape, double scale);

// Sum of log box densities plus log inverse-gamma density of sigma^2;
// -inf outside support.
double log_prior(const ModelParams& p, const PriorSpec& prior);

// Conditional of sigma^2 given the rest, under tempering exponent phi:
// IG(shape + phi*n/2, scale + phi*ss/2). phi = 1 is the ordinary posterior
// conditional; phi = 0 is the prior.
struct SigmaConditional {
  double shape = 0.0;
  double scale = 0.0;
};
SigmaConditional sigma_conditional(const PriorSpec& prior, std::size_t n, double ss, double phi);

// Artificial per-evaluation cost used by the benchmark harness to emulate an
// expensive simulator. kBusy burns CPU; kWait holds the deadline without
// burning it (stands in for remote single-core hardware when the local
// machine has fewer cores than workers).
struct EvalCost {
  enum class Mode { kNone, kBusy, kWait };
  Mode mode = Mode::kNone;
  double micros = 0.0;
};
void apply_eval_cost(const EvalCost& cost);

// Target density abstraction shared by both samplers. The expensive model
// run is exposed as a sufficient statistic (SS_q for the crack posterior) so
// that sigma updates and tempering never re-run the model, and so that the
// statistic can be evaluated locally or on remote workers interchangeably.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual double log_prior(const ModelParams& p) const = 0;

  // Expensive part: one model evaluation.
  virtual double sufficient_stat(const ModelParams& p) const = 0;

  // Vectorized evaluation; default loops over the scalar path.
  virtual void sufficient_stat_batch(std::span<const ModelParams> batch,
                                     std::span<double> out) const;

  // Cheap completion of the likelihood given the statistic.
  virtual double log_like_from_stat(double stat, const ModelParams& p) const = 0;

  virtual ModelParams draw_prior(RngStream& rng) const = 0;

  // Conditional update of sigma given the current statistic, under tempering
  // phi. Default: sigma is fixed (targets without a noise-scale parameter).
  virtual ModelParams update_sigma(const ModelParams& p, double stat, double phi,
                                   RngStream& rng) const {
    (void)stat;
    (void)phi;
    (void)rng;
    return p;
  }

  double log_likelihood(const ModelParams& p) const {
    return log_like_from_stat(sufficient_stat(p), p);
  }
};

// Tempered density: log_prior + phi * log_likelihood (unnormalized).
struct TemperedPosterior {
  const TargetDensity* target = nullptr;
  double phi = 1.0;
  double log_density(const ModelParams& p) const;
};

// The calibration posterior of the crack-growth problem.
class CrackPosterior final : public TargetDensity {
 public:
  CrackPosterior(ObservationSeries obs, PriorSpec prior, GrowthLaw law);

  double log_prior(const ModelParams& p) const override;
  double sufficient_stat(const ModelParams& p) const override;
  void sufficient_stat_batch(std::span<const ModelParams> batch,
                             std::span<double> out) const override;
  double log_like_from_stat(double ss, const ModelParams& p) const override;
  ModelParams draw_prior(RngStream& rng) const override;
  ModelParams update_sigma(const ModelParams& p, double ss, double phi,
                           RngStream& rng) const override;

  // Model predictions at the observation cycles, batch.size() x n row-major.
  // This is the unit of work shipped to workers in model-eval offload.
  void predictions_batch(std::span<const ModelParams> batch, double* out) const;
  double stat_from_predictions(std::span<const double> predictions) const;

  const ObservationSeries& observations() const { return obs_; }
  const PriorSpec& prior() const { return prior_; }
  const GrowthLaw& law() const { return law_; }
  const EvalCost& eval_cost() const { return cost_; }
  void set_eval_cost(const EvalCost& c) { cost_ = c; }

 private:
  ObservationSeries obs_;
  PriorSpec prior_;
  GrowthLaw law_;
  EvalCost cost_;
};

}  // namespace rulcast

#endif
