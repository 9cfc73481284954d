#ifndef RULCAST_RNG_HPP
#define RULCAST_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace rulcast {

// Avalanche mixer used to digest key words into a stream seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds (master seed, stage, step, particle id, ...) into a single stream key.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> words);

// Stage tags for stream keying. Values are arbitrary but frozen: changing
// them changes every sampled number in the system.
namespace stage {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kMutate = 2;
inline constexpr std::uint64_t kResample = 3;
inline constexpr std::uint64_t kChain = 4;
inline constexpr std::uint64_t kSynth = 5;
inline constexpr std::uint64_t kBand = 6;
}  // namespace stage

// Deterministic random stream. All samplers are hand-rolled on top of the
// engine's standard-specified 64-bit output; std::*_distribution is avoided
// because its algorithms are implementation-defined and would break the
// bit-exact replay and topology-independence contracts.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller pair of independent N(0,1) draws. Consumes two uniforms.
  std::pair<double, double> normal_pair();

  // Single N(0,1) draw; the pair's second value is discarded so the
  // consumption pattern stays call-count deterministic.
  double normal() { return normal_pair().first; }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by the boost
  // identity Gamma(a) = Gamma(a+1) * U^(1/a).
  double gamma(double shape);

  // Inverse-gamma(shape, scale): scale / Gamma(shape, 1), clamped away from
  // 0/inf so pathological tail draws stay finite.
  double inv_gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rulcast

#endif
