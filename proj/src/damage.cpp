#include "rulcast/damage.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rulcast {

void validate_params(const ModelParams& p) {
  if (!std::isfinite(p.log10_alpha) || !std::isfinite(p.beta) || !std::isfinite(p.sigma))
    throw std::invalid_argument("ModelParams: non-finite field");
  if (p.sigma <= 0.0) throw std::invalid_argument("ModelParams: sigma must be > 0");
}

void validate_law(const GrowthLaw& law) {
  if (!(law.a0_mm > 0.0) || !(law.a0_mm < law.a_fail_mm))
    throw std::invalid_argument("GrowthLaw: requires 0 < a0 < a_fail");
  if (law.cycle_step <= 0) throw std::invalid_argument("GrowthLaw: cycle_step must be positive");
}

ClosedForm::ClosedForm(const ModelParams& p, const GrowthLaw& law) {
  alpha_ = std::pow(10.0, p.log10_alpha);
  a0_ = law.a0_mm;
  a_fail_ = law.a_fail_mm;
  if (p.beta == 1.0) {
    exponential_ = true;
    cross_n_ = std::log(a_fail_ / a0_) / alpha_;
  } else {
    e_ = 1.0 - p.beta;
    x0_ = std::expm1(e_ * std::log(a0_));
    // a_fail^e - a0^e and alpha*e always share a sign, so this is positive.
    cross_n_ = (std::expm1(e_ * std::log(a_fail_)) - x0_) / (alpha_ * e_);
  }
}

double ClosedForm::length_at(double n) const {
  if (n >= cross_n_) return a_fail_;
  if (exponential_) {
    const double a = a0_ * std::exp(alpha_ * n);
    return a < a_fail_ ? a : a_fail_;
  }
  const double x = x0_ + alpha_ * e_ * n;
  if (x <= -1.0)
    throw std::logic_error("ClosedForm: evaluated past blowup despite a_fail cap");
  const double a = std::exp(std::log1p(x) / e_);
  return a < a_fail_ ? a : a_fail_;
}

namespace {

void check_cycles(std::span<const std::int64_t> cycles) {
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (cycles[i] < 0) throw std::invalid_argument("predict_crack: negative cycle");
    if (i > 0 && cycles[i] <= cycles[i - 1])
      throw std::invalid_argument("predict_crack: cycles must be strictly increasing");
  }
}

}  // namespace

CrackTrajectory predict_crack(const ModelParams& p, const GrowthLaw& law,
                              std::span<const std::int64_t> cycles) {
  validate_params(p);
  validate_law(law);
  check_cycles(cycles);
  const ClosedForm cf(p, law);
  CrackTrajectory out;
  out.cycles.assign(cycles.begin(), cycles.end());
  out.lengths_mm.resize(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i)
    out.lengths_mm[i] = cf.length_at(static_cast<double>(cycles[i]));
  return out;
}

void predict_lengths_batch(std::span<const ModelParams> batch, const GrowthLaw& law,
                           std::span<const std::int64_t> cycles, double* out) {
  const std::size_t n = cycles.size();
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const ClosedForm cf(batch[b], law);
    double* row = out + b * n;
    for (std::size_t i = 0; i < n; ++i)
      row[i] = cf.length_at(static_cast<double>(cycles[i]));
  }
}

std::vector<CrackTrajectory> predict_crack_batch(std::span<const ModelParams> batch,
                                                 const GrowthLaw& law,
                                                 std::span<const std::int64_t> cycles) {
  if (batch.empty()) throw std::invalid_argument("predict_crack_batch: empty batch");
  validate_law(law);
  check_cycles(cycles);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    try {
      validate_params(batch[b]);
    } catch (const std::exception& e) {
      throw std::invalid_argument("predict_crack_batch: element " + std::to_string(b) +
                                  ": " + e.what());
    }
  }
  std::vector<double> flat(batch.size() * cycles.size());
  predict_lengths_batch(batch, law, cycles, flat.data());
  std::vector<CrackTrajectory> out(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out[b].cycles.assign(cycles.begin(), cycles.end());
    out[b].lengths_mm.assign(flat.begin() + b * cycles.size(),
                             flat.begin() + (b + 1) * cycles.size());
  }
  return out;
}

std::optional<std::int64_t> failure_cycle(const ModelParams& p, const GrowthLaw& law,
                                          std::int64_t max_horizon) {
  validate_params(p);
  validate_law(law);
  const ClosedForm cf(p, law);
  const double cross = cf.crossing_cycle();
  if (!(cross <= static_cast<double>(max_horizon))) return std::nullopt;
  std::int64_t n = static_cast<std::int64_t>(std::ceil(cross));
  if (n < 0) n = 0;
  // Nudge against FP rounding of the analytic inverse.
  while (n > 0 && cf.length_at(static_cast<double>(n - 1)) >= law.a_fail_mm) --n;
  while (cf.length_at(static_cast<double>(n)) < law.a_fail_mm) ++n;
  if (n > max_horizon) return std::nullopt;
  return n;
}

CrackTrajectory integrate_numeric(const ModelParams& p, const GrowthLaw& law,
                                  std::int64_t n_max) {
  validate_params(p);
  validate_law(law);
  if (n_max < 0) throw std::invalid_argument("integrate_numeric: n_max must be >= 0");
  const double alpha = std::pow(10.0, p.log10_alpha);
  const double beta = p.beta;
  const auto f = [&](double a) { return alpha * std::pow(a, beta); };
  const double h = static_cast<double>(law.cycle_step);

  CrackTrajectory out;
  out.cycles.reserve(static_cast<std::size_t>(n_max / law.cycle_step) + 1);
  double a = law.a0_mm;
  bool failed = false;
  for (std::int64_t n = 0; n <= n_max; n += law.cycle_step) {
    out.cycles.push_back(n);
    out.lengths_mm.push_back(failed ? law.a_fail_mm : std::min(a, law.a_fail_mm));
    if (failed) continue;
    const double k1 = f(a);
    const double k2 = f(a + 0.5 * h * k1);
    const double k3 = f(a + 0.5 * h * k2);
    const double k4 = f(a + h * k3);
    a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(a) || a >= law.a_fail_mm) failed = true;
  }
  return out;
}

}  // namespace rulcast
