#ifndef RULCAST_POSTERIOR_HPP
#define RULCAST_POSTERIOR_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "rulcast/damage.hpp"

namespace rulcast {

enum class SamplerTag { kMcmc, kSmc };

// Tagged collection of accepted parameter draws from either sampler.
struct PosteriorSamples {
  std::vector<ModelParams> draws;
  double acceptance_rate = 0.0;
  SamplerTag sampler = SamplerTag::kMcmc;
  std::uint64_t seed = 0;
};

// Per-parameter marginal moments and pairwise correlations over
// (log10_alpha, beta, sigma); the textual analog of the pairwise plots.
struct SummaryStats {
  std::array<double, 3> mean{};
  std::array<double, 3> sd{};
  std::array<std::array<double, 3>, 3> corr{};
};

SummaryStats summarize(const std::vector<ModelParams>& draws);

}  // namespace rulcast

#endif
