#include "rulcast/rul.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rulcast/rng.hpp"

namespace rulcast {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = p * static_cast<double>(m - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(h), m - 2);
  const double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

PredictiveBand predictive_band(const PosteriorSamples& samples, const GrowthLaw& law,
                               std::span<const std::int64_t> grid,
                               const BandOptions& opt) {
  if (samples.draws.empty()) throw std::invalid_argument("predictive_band: no draws");
  const std::size_t n_draws = samples.draws.size();
  const std::size_t n_grid = grid.size();

  // values[g * n_draws + d]
  std::vector<double> values(n_grid * n_draws);
  for (std::size_t d = 0; d < n_draws; ++d) {
    const auto traj = predict_crack(samples.draws[d], law, grid);
    RngStream noise(stream_key({opt.seed, stage::kBand, d}));
    const double sigma = samples.draws[d].sigma;
    for (std::size_t g = 0; g < n_grid; ++g)
      values[g * n_draws + d] = traj.lengths_mm[g] + sigma * noise.normal();
  }

  PredictiveBand band;
  band.cycles.assign(grid.begin(), grid.end());
  band.lower.resize(n_grid);
  band.median.resize(n_grid);
  band.upper.resize(n_grid);
  std::vector<double> col(n_draws);
  for (std::size_t g = 0; g < n_grid; ++g) {
    std::copy(values.begin() + g * n_draws, values.begin() + (g + 1) * n_draws,
              col.begin());
    std::sort(col.begin(), col.end());
    band.lower[g] = quantile_sorted(col, opt.lower_p);
    band.median[g] = quantile_sorted(col, 0.5);
    band.upper[g] = quantile_sorted(col, opt.upper_p);
  }
  return band;
}

RulDistribution rul_distribution(const PosteriorSamples& samples, const GrowthLaw& law,
                                 std::int64_t current_cycle, std::int64_t horizon) {
  if (current_cycle < 0) throw std::invalid_argument("rul: current_cycle must be >= 0");
  if (samples.draws.empty()) throw std::invalid_argument("rul: no draws");
  RulDistribution out;
  out.current_cycle = current_cycle;
  out.rul_samples.reserve(samples.draws.size());
  for (const auto& draw : samples.draws) {
    const auto fc = failure_cycle(draw, law, horizon);
    std::int64_t fail_at;
    if (fc.has_value()) {
      fail_at = *fc;
    } else {
      fail_at = horizon;
      ++out.censored;
    }
    out.rul_samples.push_back(std::max<std::int64_t>(0, fail_at - current_cycle));
  }
  std::vector<double> sorted(out.rul_samples.begin(), out.rul_samples.end());
  std::sort(sorted.begin(), sorted.end());
  out.q05 = quantile_sorted(sorted, 0.05);
  out.q25 = quantile_sorted(sorted, 0.25);
  out.q50 = quantile_sorted(sorted, 0.50);
  out.q75 = quantile_sorted(sorted, 0.75);
  out.q95 = quantile_sorted(sorted, 0.95);
  return out;
}

std::vector<RulDistribution> rul_series(const PosteriorSamples& samples,
                                        const GrowthLaw& law,
                                        std::span<const std::int64_t> checkpoints,
                                        std::int64_t horizon) {
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("rul_series: checkpoints must be increasing");
  std::vector<RulDistribution> out;
  out.reserve(checkpoints.size());
  for (const auto c : checkpoints)
    out.push_back(rul_distribution(samples, law, c, horizon));
  return out;
}

}  // namespace rulcast
