#include "rulcast/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace rulcast {

SummaryStats summarize(const std::vector<ModelParams>& draws) {
  if (draws.empty()) throw std::invalid_argument("summarize: no draws");
  const double n = static_cast<double>(draws.size());
  SummaryStats s;
  for (const auto& d : draws) {
    s.mean[0] += d.log10_alpha;
    s.mean[1] += d.beta;
    s.mean[2] += d.sigma;
  }
  for (auto& m : s.mean) m /= n;

  std::array<std::array<double, 3>, 3> cov{};
  for (const auto& d : draws) {
    const std::array<double, 3> x{d.log10_alpha - s.mean[0], d.beta - s.mean[1],
                                  d.sigma - s.mean[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += x[i] * x[j];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cov[i][j] /= n;
  for (int i = 0; i < 3; ++i) s.sd[i] = std::sqrt(cov[i][i]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double denom = s.sd[i] * s.sd[j];
      s.corr[i][j] = denom > 0.0 ? cov[i][j] / denom : (i == j ? 1.0 : 0.0);
    }
  return s;
}

}  // namespace rulcast
