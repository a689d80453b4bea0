#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace qkdfinite {

// SplitMix64: the output is a bijective mix of (seed + counter * golden
// gamma), so any stream position and any derived stream is reachable
// without stepping through earlier state.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    state_ += kGamma;
    return mix(state_);
  }

  // Independent stream for sub-task `index` (e.g. a Monte Carlo trial).
  static constexpr std::uint64_t derive(std::uint64_t seed,
                                        std::uint64_t index) {
    return mix(mix(seed) ^ (index * kGamma + 0x632be59bd9b4e019ULL));
  }

  // Uniform double in [0, 1).
  constexpr double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qkdfinite
