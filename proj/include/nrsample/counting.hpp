#pragma once

#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "nrsample/cnf.hpp"
#include "nrsample/op_counter.hpp"
#include "nrsample/walk_step.hpp"

namespace nrsample {

/// Total weight of the words of each length derivable from each CNF
/// non-terminal, as exact integers over the table's terminal weights.
class CountTable {
 public:
  CountTable() = default;

  const mpz_class& at(NonTerminalId a, std::size_t m) const { return cells_[a * (max_length_ + 1) + m]; }
  std::span<const mpz_class> row(NonTerminalId a) const {
    return {cells_.data() + a * (max_length_ + 1), max_length_ + 1};
  }
  std::size_t max_length() const { return max_length_; }
  std::size_t non_terminal_count() const { return non_terminals_; }
  const mpz_class& terminal_weight(TerminalId t) const { return terminal_weights_[t]; }
  std::span<const mpz_class> terminal_weights() const { return terminal_weights_; }

  /// Re-checks the union, product and terminal identities on every entry.
  /// Returns false on the first mismatch.
  bool verify(const CnfGrammar& cnf) const;

 private:
  friend CountTable build_count_table(const CnfGrammar&, std::size_t, std::span<const mpz_class>,
                                      ArithmeticCounter*);
  mpz_class& cell(NonTerminalId a, std::size_t m) { return cells_[a * (max_length_ + 1) + m]; }

  std::size_t max_length_ = 0;
  std::size_t non_terminals_ = 0;
  std::vector<mpz_class> cells_;
  std::vector<mpz_class> terminal_weights_;
};

/// Bottom-up convolution over lengths 0..n with the grammar's integer
/// weights: O(|rules| n^2) arithmetic operations. Products skip lengths
/// where a factor is identically zero, so terminal-headed chains are linear.
CountTable build_count_table(const CnfGrammar& cnf, std::size_t n, ArithmeticCounter* ops = nullptr);

/// Same, with explicit per-terminal weights (e.g. all ones for counting).
CountTable build_count_table(const CnfGrammar& cnf, std::size_t n, std::span<const mpz_class> terminal_weights,
                             ArithmeticCounter* ops = nullptr);

std::vector<mpz_class> unit_weights(const CnfGrammar& cnf);

/// Product of the grammar's integer terminal weights.
mpz_class word_weight(const CnfGrammar& cnf, const Word& word);

/// A CNF symbol with its required length.
struct SizedSymbol {
  Symbol symbol;
  std::size_t length;
  friend bool operator==(const SizedSymbol&, const SizedSymbol&) = default;
};

/// An immature word under the leftmost policy. Everything left of the cursor
/// is terminal, so the word is kept as an emitted prefix plus a stack of
/// pending symbols whose top is the cursor; a derivation step is O(1).
class SizedWord {
 public:
  /// Builds a word from an explicit symbol sequence and computes its weight
  /// from the table. Terminal entries must have length 1.
  static SizedWord from_symbols(const std::vector<SizedSymbol>& symbols, const CountTable& table);

  std::vector<SizedSymbol> symbols() const;
  std::span<const TerminalId> prefix() const { return prefix_; }
  bool mature() const { return pending_.empty(); }
  /// Index of the leftmost non-terminal, or nullopt when mature.
  std::optional<std::size_t> cursor() const {
    if (pending_.empty()) return std::nullopt;
    return prefix_.size();
  }
  /// The non-terminal under the cursor. Requires !mature().
  const SizedSymbol& cursor_symbol() const { return pending_.back(); }
  const mpz_class& weight() const { return weight_; }
  std::size_t target_length() const;

  /// Product of terminal weights and table entries, from scratch.
  mpz_class recompute_weight(const CountTable& table) const;

 private:
  friend SizedWord sized_word_initial(const CnfGrammar&, const CountTable&, std::size_t);
  friend SizedWord initial_word_unchecked(const CnfGrammar&, const CountTable&, std::size_t);
  friend void apply_derivation_in_place(const CnfGrammar&, const CountTable&, SizedWord&, const WalkStep&,
                                        ArithmeticCounter*, const mpz_class*);
  void settle();

  std::vector<TerminalId> prefix_;
  std::vector<SizedSymbol> pending_;  // reversed: back() is the cursor
  mpz_class weight_;
};

/// (axiom, n) with weight w[axiom][n]. Throws ExhaustionError when the
/// language has no word of length n, std::out_of_range when n exceeds the table.
SizedWord sized_word_initial(const CnfGrammar& cnf, const CountTable& table, std::size_t n);

/// As above without the emptiness check.
SizedWord initial_word_unchecked(const CnfGrammar& cnf, const CountTable& table, std::size_t n);

/// Rewrites the cursor non-terminal and updates the cached weight with one
/// multiplication (two for products) and one exact division. Throws
/// WalkError(IllegalStep) on a step that does not fit the cursor's rule.
SizedWord apply_derivation(const CnfGrammar& cnf, const CountTable& table, const SizedWord& word,
                           const WalkStep& step, ArithmeticCounter* ops = nullptr);

/// `known_weight`, when given, is the weight of the resulting word as already
/// computed by the caller; it replaces the update arithmetic.
void apply_derivation_in_place(const CnfGrammar& cnf, const CountTable& table, SizedWord& word,
                               const WalkStep& step, ArithmeticCounter* ops = nullptr,
                               const mpz_class* known_weight = nullptr);

}  // namespace nrsample
