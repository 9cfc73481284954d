#include <doctest.h>

#include <cmath>
#include <set>

#include "rulcast/rng.hpp"

using namespace rulcast;

TEST_CASE("streams are keyed and reproducible") {
  RngStream a(stream_key({42, stage::kMutate, 3, 17}));
  RngStream b(stream_key({42, stage::kMutate, 3, 17}));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(stream_key({42, stage::kMutate, 3, 18}));
  RngStream d(stream_key({42, stage::kMutate, 4, 17}));
  RngStream e(stream_key({43, stage::kMutate, 3, 17}));
  std::set<std::uint64_t> firsts{RngStream(stream_key({42, stage::kMutate, 3, 17})).next_u64(),
                                 c.next_u64(), d.next_u64(), e.next_u64()};
  CHECK(firsts.size() == 4);
}

TEST_CASE("uniform ranges") {
  RngStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("normal pair moments") {
  RngStream rng(7);
  const int n = 400000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const auto [z0, z1] = rng.normal_pair();
    sum += z0 + z1;
    sumsq += z0 * z0 + z1 * z1;
  }
  const double mean = sum / (2.0 * n);
  const double var = sumsq / (2.0 * n) - mean * mean;
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("gamma moments (Marsaglia-Tsang, both shape regimes)") {
  RngStream rng(11);
  const int n = 200000;
  for (const double shape : {0.5, 3.0}) {
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      sum += g;
      sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(var == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("inverse-gamma mean matches scale/(shape-1)") {
  RngStream rng(13);
  const double shape = 3.0, scale = 2.0;
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.inv_gamma(shape, scale);
  CHECK(sum / n == doctest::Approx(scale / (shape - 1.0)).epsilon(0.01));
}
