#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "planrl/core/error.hpp"

namespace planrl {

// splitmix64-based generator. std:: engines are portable but the
// distributions are not, and byte-identical runs across machines are a
// hard requirement, so all sampling helpers live here.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [lo, hi] inclusive
  int64_t uniform_int(int64_t lo, int64_t hi) {
    if (hi < lo) raise(ErrorKind::Usage, "uniform_int: hi < lo");
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  double normal() {
    // Box-Muller, one value per call
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // index sampled proportionally to probs (assumed non-negative, sum > 0)
  size_t categorical(const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    if (!(total > 0.0)) raise(ErrorKind::Numeric, "categorical: non-positive mass");
    double r = next_double() * total;
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (r < acc) return i;
    }
    return probs.size() - 1;
  }

  // independent substream key derived from a seed and a path of indices
  static uint64_t derive(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t z = seed;
    for (uint64_t p : path) {
      z ^= p + 0x9e3779b97f4a7c15ull + (z << 6) + (z >> 2);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z ^= z >> 31;
    }
    return z;
  }

private:
  uint64_t state_;
};

}  // namespace planrl
