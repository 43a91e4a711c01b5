#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace molhallu {

/// Seeded random source with platform-independent draws.
///
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// go through rejection sampling on the raw 64-bit engine output instead.
/// Identical seeds therefore produce identical streams with any standard
/// library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::size_t uniform(std::size_t bound);

  /// Uniform integer in [lo, hi], inclusive.
  std::size_t uniform_between(std::size_t lo, std::size_t hi) {
    return lo + uniform(hi - lo + 1);
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent per-item seed from a run seed and an item key
/// (typically a sample id), so per-sample work is order independent.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace molhallu
