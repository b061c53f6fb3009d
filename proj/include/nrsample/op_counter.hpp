#pragma once

#include <cstdint>

namespace nrsample {

/// Big-integer operation tallies. Every routine that takes an
/// `ArithmeticCounter*` bumps it when non-null.
struct ArithmeticCounter {
  std::uint64_t additions = 0;  // additions and subtractions
  std::uint64_t multiplications = 0;
  std::uint64_t divisions = 0;
  std::uint64_t candidate_visits = 0;  // derivation candidates weighed by the sampler
  std::uint64_t random_draws = 0;
  std::uint64_t tree_nodes_touched = 0;
  std::uint64_t derivation_steps = 0;

  std::uint64_t arithmetic() const { return additions + multiplications + divisions; }

  ArithmeticCounter& operator+=(const ArithmeticCounter& o) {
    additions += o.additions;
    multiplications += o.multiplications;
    divisions += o.divisions;
    candidate_visits += o.candidate_visits;
    random_draws += o.random_draws;
    tree_nodes_touched += o.tree_nodes_touched;
    derivation_steps += o.derivation_steps;
    return *this;
  }
};

inline void count_add(ArithmeticCounter* c, std::uint64_t k = 1) {
  if (c) c->additions += k;
}
inline void count_mul(ArithmeticCounter* c, std::uint64_t k = 1) {
  if (c) c->multiplications += k;
}
inline void count_div(ArithmeticCounter* c, std::uint64_t k = 1) {
  if (c) c->divisions += k;
}

}  // namespace nrsample
