#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "psig/common.hpp"

namespace psig {

// Posterior odds model for "this candidate recurring k times is a true
// signature". `a` is the ratio of mean recurrences (non-signature over
// signature) and controls the decay in k; `b` folds the prior odds and the
// Poisson normalisers together and bounds the maximum.
struct ProbabilityModel {
  double a = 2.0;
  double b = 0.25;

  void validate() const {
    if (!(a > 1.0) || !std::isfinite(a)) throw ConfigError("model.a must be a finite number > 1");
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("model.b must be a finite number > 0");
  }

  // b >= 1 is legal but means even a unique candidate is at most a coin flip.
  bool unusual() const { return b >= 1.0; }
};

inline constexpr std::size_t kDefaultHardRecurrenceCap = 10'000;

// P(signature | k) = 1 / (1 + a^k b), k >= 1.
inline double signature_probability(const ProbabilityModel& m, std::size_t k) {
  if (k == 0) throw InvariantError("signature_probability: recurrence must be >= 1");
  // a^k b overflows to +inf for large k, which correctly yields 0.
  return 1.0 / (1.0 + std::pow(m.a, static_cast<double>(k)) * m.b);
}

struct RecurrenceCap {
  std::size_t k = 0;
  bool hit_hard_cap = false;
};

// Largest k >= 0 with P(k) > rho (strict), clamped to `hard_cap`.
// P is strictly decreasing in k, so the threshold is a frequency cap.
inline RecurrenceCap max_recurrence(const ProbabilityModel& m, double rho,
                                    std::size_t hard_cap = kDefaultHardRecurrenceCap) {
  m.validate();
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("link.rho must lie in (0, 1)");
  auto passes = [&](std::size_t k) { return signature_probability(m, k) > rho; };

  // P(k) > rho  <=>  k < log((1 - rho) / (rho b)) / log a
  const double bound = std::log((1.0 - rho) / (rho * m.b)) / std::log(m.a);
  if (!(bound > 0.0)) return {0, false};
  if (bound > static_cast<double>(hard_cap) + 1.0) return {hard_cap, true};

  auto k = static_cast<std::size_t>(std::ceil(bound));
  // Resolve rounding at the boundary against the exact predicate.
  while (k > 0 && !passes(k)) --k;
  while (k < hard_cap && passes(k + 1)) ++k;
  if (k >= hard_cap) return {hard_cap, passes(hard_cap + 1)};
  return {k, false};
}

}  // namespace psig
