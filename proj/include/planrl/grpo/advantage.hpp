#pragma once

#include <cmath>
#include <vector>

#include "planrl/core/error.hpp"

namespace planrl::grpo {

// Group-normalized advantages: (r_i - mean) / (population std + epsilon).
// A zero-variance group yields exactly zero advantages rather than an error;
// deterministic policies must not crash training.
inline std::vector<double> group_advantages(const std::vector<double>& rewards,
                                            double std_epsilon) {
  if (rewards.size() < 2) raise(ErrorKind::Usage, "group_advantages: need G >= 2 rewards");
  double lo = rewards[0], hi = rewards[0];
  for (double r : rewards) {
    if (!std::isfinite(r)) raise(ErrorKind::Numeric, "group_advantages: non-finite reward");
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  size_t n = rewards.size();
  std::vector<double> out(n, 0.0);
  if (lo == hi) return out;

  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n);
  double denom = std::sqrt(var) + std_epsilon;
  for (size_t i = 0; i < n; ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

}  // namespace planrl::grpo
