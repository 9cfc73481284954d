#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "rulcast/rng.hpp"
#include "rulcast/wire.hpp"

using namespace rulcast;

TEST_CASE("base64 known vectors and round trips") {
  const std::uint8_t man[] = {'M', 'a', 'n'};
  CHECK(wire::base64_encode(man) == "TWFu");
  const std::uint8_t ma[] = {'M', 'a'};
  CHECK(wire::base64_encode(ma) == "TWE=");
  const std::uint8_t m[] = {'M'};
  CHECK(wire::base64_encode(m) == "TQ==");
  CHECK(wire::base64_encode({}) == "");

  RngStream rng(61);
  for (std::size_t len = 0; len < 66; ++len) {
    std::vector<std::uint8_t> bytes(len);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64());
    CHECK(wire::base64_decode(wire::base64_encode(bytes)) == bytes);
  }

  CHECK_THROWS_AS(wire::base64_decode("abc"), std::runtime_error);     // bad length
  CHECK_THROWS_AS(wire::base64_decode("ab!="), std::runtime_error);    // bad char
  CHECK_THROWS_AS(wire::base64_decode("a=bc"), std::runtime_error);    // data after pad
}

TEST_CASE("f64 arrays round-trip bit-exactly, including special values") {
  std::vector<double> vals{0.0, -0.0, 1.0, -1.0 / 3.0, 1e-308, -1e308,
                           std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::denorm_min(), 0.1};
  const auto decoded = wire::decode_f64(wire::encode_f64(vals));
  REQUIRE(decoded.size() == vals.size());
  CHECK(std::memcmp(decoded.data(), vals.data(), vals.size() * sizeof(double)) == 0);
}

TEST_CASE("u64 arrays round-trip") {
  std::vector<std::uint64_t> vals{0, 1, 0xffffffffffffffffULL, 0x0123456789abcdefULL};
  CHECK(wire::decode_u64(wire::encode_u64(vals)) == vals);
}

TEST_CASE("problem digest is content-sensitive") {
  ObservationSeries obs{{0, 100, 200}, {1.0, 1.5, 2.0}};
  const GrowthLaw law{1.0, 20.0, 1};
  const PriorSpec prior;
  const auto d0 = wire::problem_digest(obs, law, prior);
  CHECK(wire::problem_digest(obs, law, prior) == d0);

  auto obs2 = obs;
  obs2.lengths_mm[1] = 1.5000001;
  CHECK(wire::problem_digest(obs2, law, prior) != d0);
  CHECK(wire::problem_digest(obs, {1.0, 21.0, 1}, prior) != d0);
  PriorSpec prior2;
  prior2.beta.hi = 3.9;
  CHECK(wire::problem_digest(obs, law, prior2) != d0);
  CHECK(wire::digest_hex(d0).size() == 16);
}

TEST_CASE("message payloads round-trip through JSON") {
  SUBCASE("model-eval request/response") {
    wire::ModelEvalRequest req;
    req.job_id = "eval-1-0-2";
    req.dataset_digest = "00ff00ff00ff00ff";
    req.log10_alpha = {-4.0, -3.5};
    req.beta = {1.0, 1.5};
    const auto back = wire::model_eval_request_from_json(wire::to_json(req));
    CHECK(back.job_id == req.job_id);
    CHECK(back.dataset_digest == req.dataset_digest);
    CHECK(back.log10_alpha == req.log10_alpha);
    CHECK(back.beta == req.beta);

    wire::ModelEvalResponse resp;
    resp.job_id = req.job_id;
    resp.n_points = 3;
    resp.predictions = {1, 2, 3, 4, 5, 6};
    const auto rback = wire::model_eval_response_from_json(wire::to_json(resp));
    CHECK(rback.predictions == resp.predictions);
    CHECK(rback.n_points == 3);
  }

  SUBCASE("mutate request/response") {
    wire::MutateRequest req;
    req.job_id = "mutate-3-1";
    req.dataset_digest = "abcdabcdabcdabcd";
    req.phi = 0.62;
    req.n_mcmc = 5;
    req.proposal_cov = {0.01, -0.002, 0.04};
    req.ids = {4, 5, 6};
    req.stream_keys = {11, 22, 33};
    req.log10_alpha = {-4, -4.1, -4.2};
    req.beta = {1, 1.1, 1.2};
    req.sigma = {0.1, 0.2, 0.3};
    const auto back = wire::mutate_request_from_json(wire::to_json(req));
    CHECK(back.phi == req.phi);
    CHECK(back.n_mcmc == 5);
    CHECK(back.proposal_cov.m01 == req.proposal_cov.m01);
    CHECK(back.ids == req.ids);
    CHECK(back.stream_keys == req.stream_keys);
    CHECK(back.sigma == req.sigma);

    wire::MutateResponse resp;
    resp.job_id = req.job_id;
    resp.log10_alpha = {-4, -4.1, -4.2};
    resp.beta = {1, 1.1, 1.2};
    resp.sigma = {0.1, 0.2, 0.3};
    resp.log_like = {-10, -11, -12};
    resp.accept_counts = {3, 0, 5};
    const auto rback = wire::mutate_response_from_json(wire::to_json(resp));
    CHECK(rback.log_like == resp.log_like);
    CHECK(rback.accept_counts == resp.accept_counts);
  }

  SUBCASE("health") {
    wire::HealthResponse h{"ok", "1234567890abcdef", 20};
    const auto back = wire::health_response_from_json(wire::to_json(h));
    CHECK(back.status == "ok");
    CHECK(back.dataset_digest == h.dataset_digest);
    CHECK(back.n_obs == 20);
  }
}

TEST_CASE("malformed payloads are rejected with diagnostics") {
  CHECK_THROWS_AS(wire::mutate_request_from_json("not json at all"), std::runtime_error);
  CHECK_THROWS_AS(wire::mutate_request_from_json("{}"), std::runtime_error);

  try {
    wire::model_eval_request_from_json(R"({"job_id":"x"})");
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("dataset_digest") != std::string::npos);
  }

  // array length disagreement
  wire::MutateRequest req;
  req.job_id = "j";
  req.dataset_digest = "d";
  req.phi = 0.5;
  req.n_mcmc = 1;
  req.ids = {1, 2};
  req.stream_keys = {1};
  req.log10_alpha = {-4, -4};
  req.beta = {1, 1};
  req.sigma = {0.1, 0.1};
  CHECK_THROWS_AS(wire::mutate_request_from_json(wire::to_json(req)), std::runtime_error);
}
