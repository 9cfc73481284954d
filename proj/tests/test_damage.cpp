#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rulcast/damage.hpp"
#include "rulcast/rng.hpp"

using namespace rulcast;

namespace {

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

double rk4_at(const ModelParams& p, const GrowthLaw& law, std::int64_t n) {
  const auto traj = integrate_numeric(p, law, n);
  return traj.lengths_mm[static_cast<std::size_t>(n / law.cycle_step)];
}

}  // namespace

TEST_CASE("beta = 0 is linear growth") {
  const ModelParams p{-3.0, 0.0, 0.1};
  const GrowthLaw law{1.0, 20.0, 1};
  const std::int64_t cycles[] = {0, 1000};
  const auto traj = predict_crack(p, law, cycles);
  CHECK(traj.lengths_mm[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(traj.lengths_mm[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero cycles returns the initial length") {
  const ModelParams p{-5.5, 2.2, 0.3};
  const GrowthLaw law{2.5, 20.0, 1};
  const std::int64_t cycles[] = {0};
  CHECK(predict_crack(p, law, cycles).lengths_mm[0] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("closed form matches the RK4 oracle at step 1") {
  const ModelParams p{-4.0, 1.3, 0.1};
  const GrowthLaw law{1.0, 20.0, 1};
  const std::int64_t cycles[] = {0, 10000, 100000};
  const auto traj = predict_crack(p, law, cycles);
  const auto oracle = integrate_numeric(p, law, 100000);
  for (std::size_t i = 0; i < 3; ++i) {
    const double want = oracle.lengths_mm[static_cast<std::size_t>(cycles[i])];
    CHECK(traj.lengths_mm[i] == doctest::Approx(want).epsilon(1e-6));
  }
  // This parameter point blows past a_fail before 1e5 cycles; both paths cap.
  CHECK(traj.lengths_mm[2] == 20.0);
}

TEST_CASE("trajectories cap at a_fail instead of blowing up") {
  const ModelParams p{-2.0, 2.5, 0.1};  // finite-time blowup just past a_fail
  const GrowthLaw law{1.0, 20.0, 1};
  const std::int64_t cycles[] = {0, 50, 100, 1000, 100000};
  const auto traj = predict_crack(p, law, cycles);
  for (double a : traj.lengths_mm) CHECK(a <= 20.0);
  CHECK(traj.lengths_mm[4] == 20.0);
}

TEST_CASE("batch equals scalar bit-for-bit") {
  const GrowthLaw law{1.0, 20.0, 1};
  const std::int64_t cycles[] = {0, 100, 5000, 20000, 100000};

  SUBCASE("singleton") {
    const ModelParams p{-4.2, 1.1, 0.2};
    const auto batch = predict_crack_batch({&p, 1}, law, cycles);
    const auto scalar = predict_crack(p, law, cycles);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(bits_equal(batch[0].lengths_mm[i], scalar.lengths_mm[i]));
  }

  SUBCASE("64 duplicated params give 64 identical trajectories") {
    std::vector<ModelParams> dup(64, ModelParams{-4.0, 1.5, 0.1});
    const auto batch = predict_crack_batch(dup, law, cycles);
    for (const auto& t : batch)
      for (std::size_t i = 0; i < 5; ++i)
        CHECK(bits_equal(t.lengths_mm[i], batch[0].lengths_mm[i]));
  }

  SUBCASE("random batch elementwise equals scalar loop") {
    RngStream rng(99);
    std::vector<ModelParams> ps;
    for (int i = 0; i < 16; ++i)
      ps.push_back({-6.0 + 4.0 * rng.uniform01(), 2.5 * rng.uniform01(),
                    0.05 + rng.uniform01()});
    const auto batch = predict_crack_batch(ps, law, cycles);
    for (int b = 0; b < 16; ++b) {
      const auto scalar = predict_crack(ps[b], law, cycles);
      for (std::size_t i = 0; i < 5; ++i)
        CHECK(bits_equal(batch[b].lengths_mm[i], scalar.lengths_mm[i]));
    }
  }
}

TEST_CASE("failure cycle closed-form inversions") {
  const GrowthLaw law{1.0, 20.0, 1};

  SUBCASE("beta = 0: (a_fail - a0) / alpha") {
    const ModelParams p{-3.0, 0.0, 0.1};
    CHECK(failure_cycle(p, law, 1'000'000).value() == 19000);
  }

  SUBCASE("beta = 1: ceil(ln(a_fail/a0)/alpha)") {
    const ModelParams p{-4.0, 1.0, 0.1};
    const double alpha = 1e-4;
    const auto expect =
        static_cast<std::int64_t>(std::ceil(std::log(20.0 / 1.0) / alpha));
    CHECK(failure_cycle(p, law, 1'000'000).value() == expect);
  }

  SUBCASE("grid-scan oracle on random params") {
    RngStream rng(123);
    for (int trial = 0; trial < 20; ++trial) {
      const ModelParams p{-5.0 + 2.5 * rng.uniform01(), 2.0 * rng.uniform01(), 0.1};
      const auto fc = failure_cycle(p, law, std::int64_t{1} << 40);
      REQUIRE(fc.has_value());
      // Scan a dense grid around the reported cycle.
      const std::int64_t n = *fc;
      const std::int64_t lo = std::max<std::int64_t>(0, n - 3);
      std::vector<std::int64_t> grid;
      for (std::int64_t c = lo; c <= n + 3; ++c) grid.push_back(c);
      const auto traj = predict_crack(p, law, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < n) CHECK(traj.lengths_mm[i] < 20.0);
        else CHECK(traj.lengths_mm[i] >= 20.0);
      }
    }
  }

  SUBCASE("horizon reported as no failure") {
    const ModelParams p{-8.0, 0.0, 0.1};  // 1.9e9 cycles to failure
    CHECK(!failure_cycle(p, law, 1000).has_value());
    CHECK(failure_cycle(p, law, std::int64_t{1} << 40).has_value());
  }
}

TEST_CASE("failure_cycle is consistent with the trajectory crossing") {
  const GrowthLaw law{1.0, 20.0, 1};
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p{-6.0 + 4.0 * rng.uniform01(), 2.5 * rng.uniform01(), 0.1};
    const auto fc = failure_cycle(p, law, std::int64_t{1} << 50);
    REQUIRE(fc.has_value());
    const ClosedForm cf(p, law);
    if (*fc > 0) CHECK(cf.length_at(static_cast<double>(*fc - 1)) < 20.0);
    CHECK(cf.length_at(static_cast<double>(*fc)) >= 20.0);
  }
}

TEST_CASE("integrate_numeric agrees with exact solutions") {
  SUBCASE("beta = 0 linear") {
    const ModelParams p{-3.0, 0.0, 0.1};
    const GrowthLaw law{1.0, 20.0, 1};
    CHECK(rk4_at(p, law, 5000) == doctest::Approx(1.0 + 1e-3 * 5000).epsilon(1e-12));
  }

  SUBCASE("beta = 1 exponential, rel err <= 1e-8 at step 1") {
    const ModelParams p{-4.0, 1.0, 0.1};
    const GrowthLaw law{1.0, 20.0, 1};
    const std::int64_t n = 20000;
    CHECK(rk4_at(p, law, n) == doctest::Approx(std::exp(1e-4 * n)).epsilon(1e-8));
  }

  SUBCASE("beta = 1.5 converges at 4th order") {
    const ModelParams p{-4.0, 1.5, 0.1};
    const std::int64_t n = 4096;
    const ClosedForm cf(p, {1.0, 20.0, 1});
    const double exact = cf.length_at(static_cast<double>(n));
    double err[3];
    const std::int64_t steps[3] = {8, 4, 2};
    for (int i = 0; i < 3; ++i) {
      const GrowthLaw law{1.0, 20.0, steps[i]};
      err[i] = std::abs(rk4_at(p, law, n) - exact);
    }
    const double order1 = std::log2(err[0] / err[1]);
    const double order2 = std::log2(err[1] / err[2]);
    CHECK(order1 >= 4.0);
    CHECK(order2 >= 4.0);
  }
}

TEST_CASE("monotone non-decreasing in cycle count") {
  RngStream rng(71);
  const GrowthLaw law{1.0, 20.0, 1};
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p{-6.0 + 5.0 * rng.uniform01(), 3.0 * rng.uniform01(),
                        0.05 + rng.uniform01()};
    std::vector<std::int64_t> cycles;
    std::int64_t c = 0;
    for (int i = 0; i < 30; ++i) {
      c += 1 + static_cast<std::int64_t>(rng.uniform01() * 5000);
      cycles.push_back(c);
    }
    const auto traj = predict_crack(p, law, cycles);
    for (std::size_t i = 1; i < traj.lengths_mm.size(); ++i)
      CHECK(traj.lengths_mm[i] >= traj.lengths_mm[i - 1]);
  }
}

TEST_CASE("input validation") {
  const GrowthLaw law{1.0, 20.0, 1};
  const ModelParams p{-4.0, 1.0, 0.1};
  const std::int64_t neg[] = {-1, 5};
  CHECK_THROWS_AS(predict_crack(p, law, neg), std::invalid_argument);
  const std::int64_t unsorted[] = {5, 5};
  CHECK_THROWS_AS(predict_crack(p, law, unsorted), std::invalid_argument);
  CHECK_THROWS_AS(predict_crack({-4.0, 1.0, 0.0}, law, std::span<const std::int64_t>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_crack(p, {20.0, 1.0, 1}, std::span<const std::int64_t>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_crack_batch({}, law, std::span<const std::int64_t>{}),
                  std::invalid_argument);

  // per-element batch errors carry the offending index
  std::vector<ModelParams> batch{{-4.0, 1.0, 0.1}, {-4.0, 1.0, -1.0}};
  const std::int64_t cyc[] = {0, 10};
  try {
    predict_crack_batch(batch, law, cyc);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("element 1") != std::string::npos);
  }
}
