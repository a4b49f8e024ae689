#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lunet {

// Counter-based generator: draw i is a pure function of (seed, stream, i),
// so disjoint counter ranges can be handed to parallel workers and replayed
// exactly. Mixing is splitmix64 over the packed counter.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  uint64_t next_u64() { return mix(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream_ + 1)), counter_++); }

  // Uniform in (0, 1].
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; two fresh uniforms per draw keeps the stream stateless.
  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  void set_counter(uint64_t c) { counter_ = c; }

 private:
  static uint64_t mix(uint64_t seed, uint64_t ctr) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (ctr + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace lunet
