#pragma once

#include <cmath>
#include <cstdint>

namespace wavephase {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based uniform in [0, 1): value at `index` of the stream keyed by
// `seed`. Order-independent, so parallel consumers stay reproducible.
inline double hash_unit(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(splitmix64(splitmix64(seed) + index) >> 11) *
         0x1.0p-53;
}

// Small sequential generator for test signals and start vectors.
struct SplitMix {
  std::uint64_t state = 0;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    const std::uint64_t out = splitmix64(state);
    state += 0x9e3779b97f4a7c15ULL;
    return out;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double gaussian() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(6.283185307179586476925287 * v);
  }
};

}  // namespace wavephase
