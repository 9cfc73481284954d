#ifndef RULCAST_DAMAGE_HPP
#define RULCAST_DAMAGE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rulcast {

// Sampled parameter vector. alpha is never stored directly; log10_alpha is
// the sampled coordinate, so alpha = 10^log10_alpha is positive by
// construction. sigma is the observation-noise standard deviation in mm.
struct ModelParams {
  double log10_alpha = 0.0;
  double beta = 0.0;
  double sigma = 1.0;
};

// Throws std::invalid_argument on non-finite fields or sigma <= 0.
void validate_params(const ModelParams& p);

// Crack-growth configuration: da/dN = alpha * a^beta integrated from a0.
// cycle_step is the stride of the numeric test integrator.
struct GrowthLaw {
  double a0_mm = 1.0;
  double a_fail_mm = 20.0;
  std::int64_t cycle_step = 1;
};

void validate_law(const GrowthLaw& law);

struct CrackTrajectory {
  std::vector<std::int64_t> cycles;
  std::vector<double> lengths_mm;
};

// Closed form of the power-law growth ODE, shared by the scalar and batched
// prediction paths so both produce identical bits.
//
//   beta != 1:  a(N) = (a0^e + alpha*e*N)^(1/e),  e = 1 - beta
//   beta == 1:  a(N) = a0 * exp(alpha*N)
//
// The general branch is evaluated as exp(log1p(x)/e) with
// x = expm1(e*ln a0) + alpha*e*N, which stays accurate near beta = 1.
class ClosedForm {
 public:
  ClosedForm(const ModelParams& p, const GrowthLaw& law);

  // Crack length at cycle n, capped at a_fail. The cap triggers strictly
  // before the beta > 1 finite-time blowup, so the bracket stays positive.
  double length_at(double n) const;

  // Real-valued cycle at which a(N) = a_fail (always finite: alpha > 0).
  double crossing_cycle() const { return cross_n_; }

 private:
  bool exponential_ = false;  // beta == 1 branch
  double alpha_ = 0.0;
  double e_ = 0.0;      // 1 - beta
  double x0_ = 0.0;     // expm1(e * ln a0)
  double a0_ = 0.0;
  double a_fail_ = 0.0;
  double cross_n_ = 0.0;
};

// Crack length at each requested cycle, capped at a_fail. Requested cycles
// must be non-negative and strictly increasing.
CrackTrajectory predict_crack(const ModelParams& p, const GrowthLaw& law,
                              std::span<const std::int64_t> cycles);

// Batched evaluation over a parameter set; element i is bit-identical to the
// scalar call. Per-element failures are rethrown with the offending index.
std::vector<CrackTrajectory> predict_crack_batch(std::span<const ModelParams> batch,
                                                 const GrowthLaw& law,
                                                 std::span<const std::int64_t> cycles);

// Flat core used by the batch paths: writes batch.size() x cycles.size()
// lengths row-major into out.
void predict_lengths_batch(std::span<const ModelParams> batch, const GrowthLaw& law,
                           std::span<const std::int64_t> cycles, double* out);

// Smallest integer N with a(N) >= a_fail, or nullopt if it exceeds the
// horizon. Analytic inversion with a one-ulp nudge so that
// a(N-1) < a_fail <= a(N) holds exactly.
std::optional<std::int64_t> failure_cycle(const ModelParams& p, const GrowthLaw& law,
                                          std::int64_t max_horizon);

// Fixed-step classical RK4 on da/dN = alpha * a^beta with step law.cycle_step,
// capped at a_fail. Test oracle for the closed form and fallback for future
// growth laws; records every step up to n_max.
CrackTrajectory integrate_numeric(const ModelParams& p, const GrowthLaw& law,
                                  std::int64_t n_max);

}  // namespace rulcast

#endif
