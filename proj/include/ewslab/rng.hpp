#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace ewslab {

/// 64-bit avalanche mixer (SplitMix64 finaliser).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-run key derived from the master seed and the run index only, so an
/// ensemble member draws the same numbers whatever order runs execute in.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run_index) {
  return mix64(mix64(master) ^ mix64(run_index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based generator: the n-th output is mix64(key + n * golden gamma).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal draws on top of CounterRng.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t key) : engine_(key) {}

  double operator()() { return dist_(engine_); }

 private:
  CounterRng engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace ewslab
