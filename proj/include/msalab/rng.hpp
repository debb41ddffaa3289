#pragma once

#include <cstdint>

namespace msalab {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0,1) from the top 53 bits of a hashed word.
constexpr double u01(std::uint64_t z) noexcept {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// Keyed counter hash: a pure function of (seed, a, b).  All randomness in the
/// library flows through this, so every draw is reproducible from its key and
/// independent of evaluation order or thread count.
constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) noexcept {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

/// Sequential stream on top of the counter construction.  Stateless apart from
/// the counter; two streams with the same seed produce identical sequences.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return hash_key(seed_, 0, ctr_++); }
  double next_u01() { return u01(next_u64()); }

  /// Integer uniform on [0, n), n >= 1.  Rejection-free modulo is fine here:
  /// n is tiny compared to 2^64 in every use.
  std::uint64_t next_index(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t seed_;
  std::uint64_t ctr_ = 0;
};

}  // namespace msalab
