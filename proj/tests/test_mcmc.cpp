#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rulcast/io.hpp"
#include "rulcast/mcmc.hpp"
#include "support/targets.hpp"

using namespace rulcast;
using testsupport::GaussianMeanTarget;
using testsupport::OffsetTarget;

namespace {

bool draws_identical(const std::vector<ModelParams>& a, const std::vector<ModelParams>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(ModelParams)) == 0;
}

}  // namespace

TEST_CASE("zero-covariance proposal is always accepted") {
  GaussianMeanTarget target({{0.0, 0.0}}, 1.0, {-50, 50}, {-50, 50});
  const TemperedPosterior tp{&target, 1.0};
  RngStream rng(3);
  ModelParams cur{0.3, -0.2, 1.0};
  for (int i = 0; i < 200; ++i) {
    const auto step = mcmc_step(cur, Mat2Sym{0, 0, 0}, tp, rng);
    CHECK(step.accepted);
    CHECK(step.params.log10_alpha == cur.log10_alpha);
  }
}

TEST_CASE("proposals outside prior support are always rejected") {
  // Prior box so tight that any nonzero step exits it.
  GaussianMeanTarget target({{0.0, 0.0}}, 1.0, {-1e-12, 1e-12}, {-1e-12, 1e-12});
  const TemperedPosterior tp{&target, 1.0};
  RngStream rng(4);
  const ModelParams cur{0.0, 0.0, 1.0};
  for (int i = 0; i < 500; ++i) {
    const auto step = mcmc_step(cur, Mat2Sym{4.0, 0.0, 4.0}, tp, rng);
    CHECK(!step.accepted);
    CHECK(step.params.log10_alpha == 0.0);
  }
}

TEST_CASE("acceptance rate on a 1-D standard normal matches an independent oracle") {
  // One 2-d data point at the origin with tau=1 and the beta coordinate
  // pinned (zero proposal row) is random-walk Metropolis on N(0,1) with
  // proposal sd 2.4; the beta term is constant and cancels in every ratio.
  GaussianMeanTarget target({{0.0, 0.0}}, 1.0, {-100, 100}, {-100, 100});
  const TemperedPosterior tp{&target, 1.0};
  const Mat2Sym cov{2.4 * 2.4, 0.0, 0.0};

  RngStream chain_rng(101);
  ModelParams cur{0.0, 0.0, 1.0};
  const int n_steps = 100000;
  int accepted = 0;
  for (int i = 0; i < n_steps; ++i) {
    const auto step = mcmc_step(cur, cov, tp, chain_rng);
    if (step.accepted) ++accepted;
    cur = step.params;
  }
  const double chain_rate = static_cast<double>(accepted) / n_steps;

  // Oracle: draw x from the target directly, propose, average min(1, ratio).
  RngStream oracle_rng(202);
  const int n_oracle = 2000000;
  double acc = 0.0;
  for (int i = 0; i < n_oracle; ++i) {
    const double x = oracle_rng.normal();
    const double y = x + 2.4 * oracle_rng.normal();
    acc += std::min(1.0, std::exp(0.5 * (x * x - y * y)));
  }
  const double oracle_rate = acc / n_oracle;

  CHECK(std::abs(chain_rate - oracle_rate) < 0.02);
}

TEST_CASE("gibbs sigma draws from the conjugate conditional") {
  const GrowthLaw law{1.0, 20.0, 1};
  const ModelParams truth{-4.0, 1.2, 0.3};
  PriorSpec prior;
  prior.sigma_sq_shape = 0.01;
  prior.sigma_sq_scale = 0.01;

  SUBCASE("moment oracle at fixed (shape, scale, n, ss)") {
    const auto obs = synth_data(truth, law, 10, 12000, 21);
    const ModelParams cur{-4.0, 1.2, 0.5};
    const double ss = sum_squares(cur, obs, law);
    const auto cond = sigma_conditional(prior, obs.size(), ss, 1.0);
    REQUIRE(cond.shape > 1.0);
    const double want_mean_var = cond.scale / (cond.shape - 1.0);

    RngStream rng(31);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto p = gibbs_sigma(cur, obs, law, prior, rng);
      sum += p.sigma * p.sigma;
    }
    CHECK(sum / n == doctest::Approx(want_mean_var).epsilon(0.01));
  }

  SUBCASE("large n concentrates at the true sigma") {
    const auto obs = synth_data(truth, law, 2000, 14000, 22);
    RngStream rng(32);
    double sum = 0.0;
    const int n = 500;
    for (int i = 0; i < n; ++i) sum += gibbs_sigma(truth, obs, law, prior, rng).sigma;
    CHECK(sum / n == doctest::Approx(truth.sigma).epsilon(0.02));
  }
}

TEST_CASE("run_mcmc with paper defaults retains 6000 draws") {
  const auto data = GaussianMeanTarget::make_data(25, -4.0, 1.5, 0.5, 77);
  GaussianMeanTarget target(data, 0.5, {-8, -1}, {0, 4});
  McmcConfig cfg;  // 50000 / 20000 / thin 5
  cfg.init = {-4.0, 1.5, 1.0};
  cfg.seed = 5;
  const auto res = run_mcmc(cfg, target);
  CHECK(res.samples.draws.size() == 6000);
  CHECK(res.samples.acceptance_rate > 0.05);
  CHECK(res.samples.acceptance_rate < 0.9);
}

TEST_CASE("conjugate Gaussian-mean posterior is recovered") {
  const auto data = GaussianMeanTarget::make_data(25, -4.0, 1.5, 0.5, 88);
  GaussianMeanTarget target(data, 0.5, {-8, -1}, {0, 4});
  const auto want = target.posterior_mean();
  const double want_sd = target.posterior_sd();

  McmcConfig cfg;
  cfg.n_samples = 20000;
  cfg.n_burn = 5000;
  cfg.thin = 5;
  cfg.init = {-4.0, 1.5, 1.0};
  cfg.init_cov = {0.04, 0.0, 0.04};
  cfg.adapt_start = 500;
  cfg.seed = 6;
  const auto res = run_mcmc(cfg, target);

  const auto s = summarize(res.samples.draws);
  CHECK(std::abs(s.mean[0] - want[0]) < 0.02 * std::abs(want[0]));
  CHECK(std::abs(s.mean[1] - want[1]) < 0.02 * std::abs(want[1]));
  CHECK(s.sd[0] == doctest::Approx(want_sd).epsilon(0.05));
  CHECK(s.sd[1] == doctest::Approx(want_sd).epsilon(0.05));
}

TEST_CASE("retained covariance converges on a 2-D Gaussian target") {
  const auto data = GaussianMeanTarget::make_data(25, -4.0, 1.5, 0.5, 99);
  GaussianMeanTarget target(data, 0.5, {-20, 20}, {-20, 20});
  const double want_var = target.posterior_sd() * target.posterior_sd();

  McmcConfig cfg;
  cfg.n_samples = 100000;
  cfg.n_burn = 10000;
  cfg.thin = 1;
  cfg.init = {-4.0, 1.5, 1.0};
  cfg.init_cov = {0.02, 0.0, 0.02};
  cfg.seed = 7;
  const auto res = run_mcmc(cfg, target);

  double m0 = 0, m1 = 0;
  for (const auto& d : res.samples.draws) {
    m0 += d.log10_alpha;
    m1 += d.beta;
  }
  m0 /= res.samples.draws.size();
  m1 /= res.samples.draws.size();
  double c00 = 0, c01 = 0, c11 = 0;
  for (const auto& d : res.samples.draws) {
    c00 += (d.log10_alpha - m0) * (d.log10_alpha - m0);
    c01 += (d.log10_alpha - m0) * (d.beta - m1);
    c11 += (d.beta - m1) * (d.beta - m1);
  }
  c00 /= res.samples.draws.size();
  c01 /= res.samples.draws.size();
  c11 /= res.samples.draws.size();

  const double frob_err = std::sqrt((c00 - want_var) * (c00 - want_var) +
                                    2.0 * c01 * c01 + (c11 - want_var) * (c11 - want_var));
  const double frob_truth = std::sqrt(2.0) * want_var;
  CHECK(frob_err / frob_truth < 0.05);
}

TEST_CASE("same seed gives bit-identical draws") {
  const GrowthLaw law{1.0, 20.0, 1};
  const auto obs = synth_data({-4.0, 1.2, 0.15}, law, 15, 14000, 41);
  const CrackPosterior target(obs, PriorSpec{}, law);
  McmcConfig cfg;
  cfg.n_samples = 3000;
  cfg.n_burn = 1000;
  cfg.init = {-4.0, 1.2, 0.2};
  cfg.seed = 9;
  const auto a = run_mcmc(cfg, target);
  const auto b = run_mcmc(cfg, target);
  CHECK(draws_identical(a.samples.draws, b.samples.draws));
  CHECK(a.samples.acceptance_rate == b.samples.acceptance_rate);
}

TEST_CASE("multiplying the likelihood by a constant changes nothing") {
  const GrowthLaw law{1.0, 20.0, 1};
  const auto obs = synth_data({-4.0, 1.2, 0.15}, law, 15, 14000, 42);
  const CrackPosterior base(obs, PriorSpec{}, law);
  const OffsetTarget shifted(base, 123.456);  // likelihood x exp(123.456)

  McmcConfig cfg;
  cfg.n_samples = 4000;
  cfg.n_burn = 500;
  cfg.init = {-4.0, 1.2, 0.2};
  cfg.seed = 10;
  const auto a = run_mcmc(cfg, base);
  const auto b = run_mcmc(cfg, shifted);
  CHECK(a.samples.acceptance_rate == b.samples.acceptance_rate);
  CHECK(draws_identical(a.samples.draws, b.samples.draws));
}

TEST_CASE("adapted proposal stays usable even from a degenerate history") {
  RunningCov2 rc;
  for (int i = 0; i < 100; ++i) rc.add(1.5, -0.5);  // zero variance
  const auto cov = add_jitter(rc.covariance(), 1e-10);
  const auto chol = cholesky(cov);
  CHECK(chol.l00 > 0.0);
  CHECK(chol.l11 > 0.0);
}

TEST_CASE("config validation") {
  GaussianMeanTarget target({{0.0, 0.0}}, 1.0, {-1, 1}, {-1, 1});
  McmcConfig cfg;
  cfg.n_samples = 100;
  cfg.n_burn = 100;  // must be < n_samples
  CHECK_THROWS_AS(run_mcmc(cfg, target), std::invalid_argument);

  McmcConfig bad_init;
  bad_init.n_samples = 100;
  bad_init.n_burn = 10;
  bad_init.init = {5.0, 0.0, 1.0};  // outside box
  CHECK_THROWS_AS(run_mcmc(bad_init, target), std::invalid_argument);
}
