#include "rulcast/wire.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace rulcast::wire {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t f64_bits(double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, sizeof v);
  return v;
}

double bits_f64(std::uint64_t v) {
  double d;
  std::memcpy(&d, &v, sizeof d);
  return d;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
    i += 3;
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (rem == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw std::runtime_error("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        vals[j] = 0;
        ++pad;
      } else {
        vals[j] = decode_char(c);
        if (vals[j] < 0) throw std::runtime_error("base64: invalid character");
        if (pad > 0) throw std::runtime_error("base64: data after padding");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

std::string encode_f64(std::span<const double> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) put_u64_le(bytes, f64_bits(v));
  return base64_encode(bytes);
}

std::vector<double> decode_f64(const std::string& text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw std::runtime_error("decode_f64: byte count not multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bits_f64(get_u64_le(&bytes[i * 8]));
  return out;
}

std::string encode_u64(std::span<const std::uint64_t> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 8);
  for (std::uint64_t v : values) put_u64_le(bytes, v);
  return base64_encode(bytes);
}

std::vector<std::uint64_t> decode_u64(const std::string& text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw std::runtime_error("decode_u64: byte count not multiple of 8");
  std::vector<std::uint64_t> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_u64_le(&bytes[i * 8]);
  return out;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_f64(std::uint64_t h, double v) {
  std::vector<std::uint8_t> b;
  put_u64_le(b, f64_bits(v));
  return fnv1a(h, b);
}

std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
  std::vector<std::uint8_t> b;
  put_u64_le(b, v);
  return fnv1a(h, b);
}

}  // namespace

std::uint64_t problem_digest(const ObservationSeries& obs, const GrowthLaw& law,
                             const PriorSpec& prior) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_u64(h, obs.size());
  for (auto c : obs.cycles) h = fnv1a_u64(h, static_cast<std::uint64_t>(c));
  for (auto l : obs.lengths_mm) h = fnv1a_f64(h, l);
  h = fnv1a_f64(h, law.a0_mm);
  h = fnv1a_f64(h, law.a_fail_mm);
  h = fnv1a_u64(h, static_cast<std::uint64_t>(law.cycle_step));
  h = fnv1a_f64(h, prior.log10_alpha.lo);
  h = fnv1a_f64(h, prior.log10_alpha.hi);
  h = fnv1a_f64(h, prior.beta.lo);
  h = fnv1a_f64(h, prior.beta.hi);
  h = fnv1a_f64(h, prior.sigma_sq_shape);
  h = fnv1a_f64(h, prior.sigma_sq_scale);
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

// ---- JSON -----------------------------------------------------------------

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("wire: malformed JSON payload");
  return j;
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name))
    throw std::runtime_error(std::string("wire: missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(std::string("wire: field '") + name + "' has wrong type");
  }
}

}  // namespace

std::string to_json(const ModelEvalRequest& r) {
  json j{{"job_id", r.job_id},
         {"dataset_digest", r.dataset_digest},
         {"count", r.log10_alpha.size()},
         {"log10_alpha", encode_f64(r.log10_alpha)},
         {"beta", encode_f64(r.beta)}};
  return j.dump();
}

ModelEvalRequest model_eval_request_from_json(const std::string& text) {
  const json j = parse(text);
  ModelEvalRequest r;
  r.job_id = field<std::string>(j, "job_id");
  r.dataset_digest = field<std::string>(j, "dataset_digest");
  r.log10_alpha = decode_f64(field<std::string>(j, "log10_alpha"));
  r.beta = decode_f64(field<std::string>(j, "beta"));
  const auto count = field<std::size_t>(j, "count");
  if (r.log10_alpha.size() != count || r.beta.size() != count)
    throw std::runtime_error("wire: model-eval array sizes disagree with count");
  return r;
}

std::string to_json(const ModelEvalResponse& r) {
  json j{{"job_id", r.job_id},
         {"n_points", r.n_points},
         {"predictions", encode_f64(r.predictions)}};
  return j.dump();
}

ModelEvalResponse model_eval_response_from_json(const std::string& text) {
  const json j = parse(text);
  ModelEvalResponse r;
  r.job_id = field<std::string>(j, "job_id");
  r.n_points = field<std::size_t>(j, "n_points");
  r.predictions = decode_f64(field<std::string>(j, "predictions"));
  if (r.n_points == 0 || r.predictions.size() % r.n_points != 0)
    throw std::runtime_error("wire: prediction matrix shape mismatch");
  return r;
}

std::string to_json(const MutateRequest& r) {
  const double cov[3] = {r.proposal_cov.m00, r.proposal_cov.m01, r.proposal_cov.m11};
  json j{{"job_id", r.job_id},
         {"dataset_digest", r.dataset_digest},
         {"phi", encode_f64({&r.phi, 1})},
         {"n_mcmc", r.n_mcmc},
         {"proposal_cov", encode_f64(cov)},
         {"ids", r.ids},
         {"stream_keys", encode_u64(r.stream_keys)},
         {"log10_alpha", encode_f64(r.log10_alpha)},
         {"beta", encode_f64(r.beta)},
         {"sigma", encode_f64(r.sigma)}};
  return j.dump();
}

MutateRequest mutate_request_from_json(const std::string& text) {
  const json j = parse(text);
  MutateRequest r;
  r.job_id = field<std::string>(j, "job_id");
  r.dataset_digest = field<std::string>(j, "dataset_digest");
  const auto phi = decode_f64(field<std::string>(j, "phi"));
  if (phi.size() != 1) throw std::runtime_error("wire: phi must be a single value");
  r.phi = phi[0];
  r.n_mcmc = field<int>(j, "n_mcmc");
  const auto cov = decode_f64(field<std::string>(j, "proposal_cov"));
  if (cov.size() != 3) throw std::runtime_error("wire: proposal_cov must have 3 entries");
  r.proposal_cov = {cov[0], cov[1], cov[2]};
  r.ids = field<std::vector<std::uint32_t>>(j, "ids");
  r.stream_keys = decode_u64(field<std::string>(j, "stream_keys"));
  r.log10_alpha = decode_f64(field<std::string>(j, "log10_alpha"));
  r.beta = decode_f64(field<std::string>(j, "beta"));
  r.sigma = decode_f64(field<std::string>(j, "sigma"));
  const std::size_t k = r.ids.size();
  if (r.stream_keys.size() != k || r.log10_alpha.size() != k || r.beta.size() != k ||
      r.sigma.size() != k)
    throw std::runtime_error("wire: mutate block arrays must share one length");
  if (r.n_mcmc < 0) throw std::runtime_error("wire: n_mcmc must be >= 0");
  return r;
}

std::string to_json(const MutateResponse& r) {
  json j{{"job_id", r.job_id},
         {"log10_alpha", encode_f64(r.log10_alpha)},
         {"beta", encode_f64(r.beta)},
         {"sigma", encode_f64(r.sigma)},
         {"log_like", encode_f64(r.log_like)},
         {"accept_counts", r.accept_counts}};
  return j.dump();
}

MutateResponse mutate_response_from_json(const std::string& text) {
  const json j = parse(text);
  MutateResponse r;
  r.job_id = field<std::string>(j, "job_id");
  r.log10_alpha = decode_f64(field<std::string>(j, "log10_alpha"));
  r.beta = decode_f64(field<std::string>(j, "beta"));
  r.sigma = decode_f64(field<std::string>(j, "sigma"));
  r.log_like = decode_f64(field<std::string>(j, "log_like"));
  r.accept_counts = field<std::vector<std::int64_t>>(j, "accept_counts");
  const std::size_t k = r.log10_alpha.size();
  if (r.beta.size() != k || r.sigma.size() != k || r.log_like.size() != k ||
      r.accept_counts.size() != k)
    throw std::runtime_error("wire: mutate response arrays must share one length");
  return r;
}

std::string to_json(const HealthResponse& r) {
  json j{{"status", r.status}, {"dataset_digest", r.dataset_digest}, {"n_obs", r.n_obs}};
  return j.dump();
}

HealthResponse health_response_from_json(const std::string& text) {
  const json j = parse(text);
  HealthResponse r;
  r.status = field<std::string>(j, "status");
  r.dataset_digest = field<std::string>(j, "dataset_digest");
  r.n_obs = field<std::size_t>(j, "n_obs");
  return r;
}

}  // namespace rulcast::wire
