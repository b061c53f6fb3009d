#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "nrsample/grammar.hpp"

namespace nrsample {

/// A mature word as a sequence of terminal ids.
using Word = std::vector<TerminalId>;

/// One atomic derivation of the leftmost pending non-terminal.
struct WalkStep {
  enum class Kind : std::uint8_t { UnionLeft, UnionRight, ProductSplit, Emit };
  Kind kind;
  std::uint32_t value = 0;  // left-part length for ProductSplit, terminal id for Emit

  static WalkStep union_left() { return {Kind::UnionLeft, 0}; }
  static WalkStep union_right() { return {Kind::UnionRight, 0}; }
  static WalkStep split(std::uint32_t left_length) { return {Kind::ProductSplit, left_length}; }
  static WalkStep emit(TerminalId t) { return {Kind::Emit, t}; }

  /// Dense ordering key, used by the prefix tree.
  std::uint64_t key() const { return (std::uint64_t{static_cast<std::uint8_t>(kind)} << 32) | value; }

  friend bool operator==(const WalkStep&, const WalkStep&) = default;
  friend auto operator<=>(const WalkStep& a, const WalkStep& b) { return a.key() <=> b.key(); }
};

/// The derivation choices, in leftmost order, that produce one word of
/// length `n` from the axiom.
struct ParseWalk {
  std::vector<WalkStep> steps;
  std::size_t n = 0;

  friend bool operator==(const ParseWalk&, const ParseWalk&) = default;
};

}  // namespace nrsample
