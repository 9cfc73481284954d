#include <doctest.h>

#include <cmath>

#include "rulcast/bayes.hpp"
#include "rulcast/io.hpp"
#include "rulcast/rng.hpp"

using namespace rulcast;

namespace {

ObservationSeries exact_series(const ModelParams& p, const GrowthLaw& law, int n,
                               std::int64_t span) {
  std::vector<std::int64_t> cycles;
  for (int i = 0; i < n; ++i) cycles.push_back(span * i / (n - 1));
  const auto traj = predict_crack(p, law, cycles);
  return {traj.cycles, traj.lengths_mm};
}

}  // namespace

TEST_CASE("sum of squares") {
  const GrowthLaw law{1.0, 20.0, 1};
  const ModelParams p{-4.0, 1.2, 0.1};

  SUBCASE("series generated exactly by the params has zero residual") {
    const auto obs = exact_series(p, law, 10, 12000);
    CHECK(sum_squares(p, obs, law) == 0.0);
  }

  SUBCASE("one point with residual 0.5 gives 0.25") {
    const double obs[] = {1.5};
    const double pred[] = {1.0};
    CHECK(sum_squares(std::span<const double>(obs), std::span<const double>(pred)) ==
          doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("matches independent elementwise recomputation") {
    auto obs = exact_series(p, law, 10, 12000);
    for (auto& v : obs.lengths_mm) v += 0.05;  // perturb
    const ModelParams q{-4.05, 1.25, 0.1};
    const auto traj = predict_crack(q, law, obs.cycles);
    double want = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double r = obs.lengths_mm[i] - traj.lengths_mm[i];
      want += r * r;
    }
    CHECK(sum_squares(q, obs, law) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("gaussian log-likelihood") {
  SUBCASE("n=1, sigma=1, ss=0 -> -ln(2*pi)/2") {
    CHECK(log_likelihood_from_ss(0.0, 1.0, 1) ==
          doctest::Approx(-0.91893853320467274).epsilon(1e-12));
  }

  SUBCASE("zero residual reduces to the normalizer") {
    for (const std::size_t n : {2u, 5u, 50u})
      for (const double s : {0.1, 1.0, 3.0})
        CHECK(log_likelihood_from_ss(0.0, s, n) ==
              doctest::Approx(-0.5 * n * std::log(2.0 * M_PI * s * s)).epsilon(1e-12));
  }

  SUBCASE("exp(log_likelihood) equals the product of per-point densities") {
    const GrowthLaw law{1.0, 20.0, 1};
    const ModelParams p{-4.0, 1.1, 0.4};
    auto obs = exact_series(p, law, 5, 9000);
    for (std::size_t i = 0; i < obs.size(); ++i)
      obs.lengths_mm[i] += 0.1 * static_cast<double>(i % 3) - 0.1;
    const auto traj = predict_crack(p, law, obs.cycles);
    double product = 1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double r = obs.lengths_mm[i] - traj.lengths_mm[i];
      product *= std::exp(-r * r / (2.0 * p.sigma * p.sigma)) /
                 std::sqrt(2.0 * M_PI * p.sigma * p.sigma);
    }
    CHECK(std::exp(log_likelihood(p, obs, law)) ==
          doctest::Approx(product).epsilon(1e-10));
  }

  SUBCASE("monotone penalty: larger ss strictly lowers the likelihood") {
    double prev = log_likelihood_from_ss(0.0, 0.5, 10);
    for (double ss = 0.5; ss < 5.0; ss += 0.5) {
      const double ll = log_likelihood_from_ss(ss, 0.5, 10);
      CHECK(ll < prev);
      prev = ll;
    }
  }
}

TEST_CASE("log prior") {
  PriorSpec prior;
  prior.log10_alpha = {-8.0, -1.0};
  prior.beta = {0.0, 4.0};

  SUBCASE("uniform part is flat inside the box") {
    const ModelParams a{-7.0, 0.5, 0.3};
    const ModelParams b{-2.0, 3.5, 0.3};
    CHECK(log_prior(a, prior) == doctest::Approx(log_prior(b, prior)).epsilon(1e-14));
    CHECK(std::isfinite(log_prior(a, prior)));
  }

  SUBCASE("outside support is -inf") {
    CHECK(log_prior({-4.0, 4.5, 0.3}, prior) == -INFINITY);
    CHECK(log_prior({-9.0, 1.0, 0.3}, prior) == -INFINITY);
    CHECK(log_prior({-4.0, 1.0, -0.1}, prior) == -INFINITY);
  }

  SUBCASE("sigma^2 density matches the inverse-gamma formula") {
    const double x = 0.7, shape = 1.3, scale = 0.4;
    const double want = shape * std::log(scale) - std::lgamma(shape) -
                        (shape + 1.0) * std::log(x) - scale / x;
    CHECK(log_inv_gamma_density(x, shape, scale) == doctest::Approx(want).epsilon(1e-13));

    // and the full prior is box terms + that density at sigma^2
    prior.sigma_sq_shape = shape;
    prior.sigma_sq_scale = scale;
    const ModelParams p{-4.0, 1.0, std::sqrt(x)};
    const double box = -std::log(7.0) - std::log(4.0);
    CHECK(log_prior(p, prior) == doctest::Approx(box + want).epsilon(1e-12));
  }
}

TEST_CASE("tempered posterior") {
  const GrowthLaw law{1.0, 20.0, 1};
  const ModelParams truth{-4.0, 1.2, 0.2};
  auto obs = exact_series(truth, law, 8, 10000);
  obs.lengths_mm[3] += 0.3;
  const CrackPosterior target(obs, PriorSpec{}, law);
  const ModelParams p{-4.1, 1.3, 0.25};

  const double lp = target.log_prior(p);
  const double ll = target.log_likelihood(p);

  SUBCASE("phi=0 is the prior") {
    CHECK(TemperedPosterior{&target, 0.0}.log_density(p) == lp);
  }
  SUBCASE("phi=1 is prior + likelihood") {
    CHECK(TemperedPosterior{&target, 1.0}.log_density(p) ==
          doctest::Approx(lp + ll).epsilon(1e-14));
  }
  SUBCASE("affine in phi: midpoint is the mean of the endpoints") {
    const double d0 = TemperedPosterior{&target, 0.0}.log_density(p);
    const double d1 = TemperedPosterior{&target, 1.0}.log_density(p);
    const double dh = TemperedPosterior{&target, 0.5}.log_density(p);
    CHECK(dh == doctest::Approx(0.5 * (d0 + d1)).epsilon(1e-12));
  }
  SUBCASE("outside support stays -inf at any phi") {
    const ModelParams bad{-4.0, 9.0, 0.2};
    CHECK(TemperedPosterior{&target, 0.0}.log_density(bad) == -INFINITY);
    CHECK(TemperedPosterior{&target, 0.7}.log_density(bad) == -INFINITY);
  }
}

TEST_CASE("sigma conditional") {
  PriorSpec prior;
  prior.sigma_sq_shape = 0.01;
  prior.sigma_sq_scale = 0.01;

  SUBCASE("no data: conditional equals the prior hyperparameters") {
    const auto c = sigma_conditional(prior, 0, 0.0, 1.0);
    CHECK(c.shape == 0.01);
    CHECK(c.scale == 0.01);
  }
  SUBCASE("phi = 0 also reduces to the prior") {
    const auto c = sigma_conditional(prior, 50, 123.0, 0.0);
    CHECK(c.shape == 0.01);
    CHECK(c.scale == 0.01);
  }
  SUBCASE("full posterior case") {
    const auto c = sigma_conditional(prior, 10, 4.0, 1.0);
    CHECK(c.shape == doctest::Approx(5.01));
    CHECK(c.scale == doctest::Approx(2.01));
  }
}

TEST_CASE("crack posterior batch equals scalar and prior draws stay in the box") {
  const GrowthLaw law{1.0, 20.0, 1};
  const ModelParams truth{-4.0, 1.2, 0.15};
  const auto obs = synth_data(truth, law, 12, 14000, 3);
  PriorSpec prior;
  const CrackPosterior target(obs, prior, law);

  RngStream rng(17);
  std::vector<ModelParams> ps;
  for (int i = 0; i < 10; ++i) ps.push_back(target.draw_prior(rng));
  for (const auto& p : ps) {
    CHECK(p.log10_alpha >= prior.log10_alpha.lo);
    CHECK(p.log10_alpha <= prior.log10_alpha.hi);
    CHECK(p.beta >= prior.beta.lo);
    CHECK(p.beta <= prior.beta.hi);
    CHECK(p.sigma > 0.0);
  }

  std::vector<double> batch(ps.size());
  target.sufficient_stat_batch(ps, batch);
  for (std::size_t i = 0; i < ps.size(); ++i)
    CHECK(batch[i] == target.sufficient_stat(ps[i]));
}
