#ifndef RULCAST_RUL_HPP
#define RULCAST_RUL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rulcast/damage.hpp"
#include "rulcast/posterior.hpp"

namespace rulcast {

// Pointwise predictive quantiles of crack length over a cycle grid.
struct PredictiveBand {
  std::vector<std::int64_t> cycles;
  std::vector<double> lower;   // 2.5% by default
  std::vector<double> median;
  std::vector<double> upper;   // 97.5% by default
};

// Remaining-cycles-to-failure distribution at one current cycle.
struct RulDistribution {
  std::int64_t current_cycle = 0;
  std::vector<std::int64_t> rul_samples;  // one per posterior draw
  double q05 = 0, q25 = 0, q50 = 0, q75 = 0, q95 = 0;
  std::int64_t censored = 0;  // draws that never fail within the horizon
};

// Empirical quantile with linear interpolation between order statistics
// (values must be sorted ascending). Single fixed rule so outputs are
// reproducible bit-for-bit.
double quantile_sorted(std::span<const double> sorted, double p);

struct BandOptions {
  double lower_p = 0.025;
  double upper_p = 0.975;
  std::uint64_t seed = 1;
};

// For each draw: trajectory on the grid plus iid Normal(0, sigma_draw^2)
// noise per grid point; empirical quantiles across draws at each grid cycle.
// Noise streams are keyed on (seed, draw index) so per-draw propagation can
// be scheduled freely.
PredictiveBand predictive_band(const PosteriorSamples& samples, const GrowthLaw& law,
                               std::span<const std::int64_t> grid, const BandOptions& opt);

// Per draw: rul = max(0, failure_cycle - current_cycle); draws that never
// fail within the horizon are recorded at the horizon and counted.
RulDistribution rul_distribution(const PosteriorSamples& samples, const GrowthLaw& law,
                                 std::int64_t current_cycle, std::int64_t horizon);

std::vector<RulDistribution> rul_series(const PosteriorSamples& samples,
                                        const GrowthLaw& law,
                                        std::span<const std::int64_t> checkpoints,
                                        std::int64_t horizon);

}  // namespace rulcast

#endif
