#include "nrsample/random_source.hpp"

#include <stdexcept>
#include <vector>

namespace nrsample {

mpz_class RandomSource::uniform_below(const mpz_class& bound) {
  if (bound < 1) throw std::invalid_argument("uniform_below needs a positive bound");
  if (bound == 1) return 0;
  const mpz_class top = bound - 1;
  const std::size_t bits = mpz_sizeinbase(top.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  const unsigned spare = static_cast<unsigned>(words * 64 - bits);
  std::vector<std::uint64_t> buffer(words);
  mpz_class value;
  for (;;) {
    // Most significant word first.
    for (auto& w : buffer) w = engine_();
    buffer.front() >>= spare;
    mpz_import(value.get_mpz_t(), words, 1, sizeof(std::uint64_t), 0, 0, buffer.data());
    if (value < bound) return value;
  }
}

}  // namespace nrsample
