#ifndef RULCAST_WIRE_HPP
#define RULCAST_WIRE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rulcast/bayes.hpp"
#include "rulcast/mat2.hpp"

namespace rulcast::wire {

// Numeric arrays cross the wire as base64-encoded little-endian IEEE-754
// doubles (or uint64 words) so round-trips are bit-exact; plain decimal JSON
// numbers would not be.
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

std::string encode_f64(std::span<const double> values);
std::vector<double> decode_f64(const std::string& text);
std::string encode_u64(std::span<const std::uint64_t> values);
std::vector<std::uint64_t> decode_u64(const std::string& text);

// FNV-1a over the canonical little-endian byte layout of the problem
// definition (observations + growth law + prior). Coordinator and workers
// must agree on this digest before any job is accepted.
std::uint64_t problem_digest(const ObservationSeries& obs, const GrowthLaw& law,
                             const PriorSpec& prior);
std::string digest_hex(std::uint64_t digest);

// ---- request/response payloads -------------------------------------------

struct ModelEvalRequest {
  std::string job_id;
  std::string dataset_digest;
  std::vector<double> log10_alpha;
  std::vector<double> beta;
};

struct ModelEvalResponse {
  std::string job_id;
  std::size_t n_points = 0;
  std::vector<double> predictions;  // count x n_points, row-major
};

struct MutateRequest {
  std::string job_id;
  std::string dataset_digest;
  double phi = 0.0;
  int n_mcmc = 0;
  Mat2Sym proposal_cov{};
  std::vector<std::uint32_t> ids;
  std::vector<std::uint64_t> stream_keys;
  std::vector<double> log10_alpha;
  std::vector<double> beta;
  std::vector<double> sigma;
};

struct MutateResponse {
  std::string job_id;
  std::vector<double> log10_alpha;
  std::vector<double> beta;
  std::vector<double> sigma;
  std::vector<double> log_like;
  std::vector<std::int64_t> accept_counts;
};

struct HealthResponse {
  std::string status;
  std::string dataset_digest;
  std::size_t n_obs = 0;
};

// JSON text (de)serialization; parsing throws std::runtime_error with a
// diagnostic on malformed payloads.
std::string to_json(const ModelEvalRequest&);
ModelEvalRequest model_eval_request_from_json(const std::string&);
std::string to_json(const ModelEvalResponse&);
ModelEvalResponse model_eval_response_from_json(const std::string&);
std::string to_json(const MutateRequest&);
MutateRequest mutate_request_from_json(const std::string&);
std::string to_json(const MutateResponse&);
MutateResponse mutate_response_from_json(const std::string&);
std::string to_json(const HealthResponse&);
HealthResponse health_response_from_json(const std::string&);

}  // namespace rulcast::wire

#endif
