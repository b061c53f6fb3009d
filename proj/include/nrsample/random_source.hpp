#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace nrsample {

/// Seeded, platform-independent generator (std::mt19937_64) with an exactly
/// uniform draw over arbitrary-precision ranges.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound). Draws ceil(bits(bound - 1) / 64) words, masks the
  /// top word to the bit length and rejects values >= bound, so at most two
  /// attempts are expected. bound == 1 consumes nothing. Requires bound >= 1.
  mpz_class uniform_below(const mpz_class& bound);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nrsample
