#include "rulcast/rng.hpp"

#include <cmath>

namespace rulcast {

std::uint64_t stream_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t k = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t w : words) k = splitmix64(k ^ w);
  return k;
}

std::pair<double, double> RngStream::normal_pair() {
  const double u1 = uniform_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    const double u = uniform_open();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::inv_gamma(double shape, double scale) {
  // Gamma(shape) draws can underflow for shape << 1 (the sigma^2 prior uses
  // shape 0.01); the clamp keeps the reciprocal finite. Affected draws sit
  // so deep in the prior tail that they carry no posterior mass.
  double g = gamma(shape);
  if (g < 1e-290) g = 1e-290;
  double x = scale / g;
  if (x > 1e290) x = 1e290;
  return x;
}

}  // namespace rulcast
