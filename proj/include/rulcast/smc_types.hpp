#ifndef RULCAST_SMC_TYPES_HPP
#define RULCAST_SMC_TYPES_HPP

#include <cstdint>
#include <vector>

#include "rulcast/damage.hpp"

namespace rulcast {

struct Particle {
  ModelParams params{};
  double log_weight = 0.0;
  double log_like = 0.0;  // cached log-likelihood at params
  std::uint32_t id = 0;
};

struct ParticleEnsemble {
  std::vector<Particle> particles;
  double phi = 0.0;
  std::int64_t step_index = 0;   // tempering step counter
  std::uint64_t seed = 0;        // master seed all streams derive from
  std::size_t size() const { return particles.size(); }
};

}  // namespace rulcast

#endif
