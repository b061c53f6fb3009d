#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "nrsample/cnf.hpp"
#include "nrsample/grammar.hpp"
#include "nrsample/walk_step.hpp"

namespace nrsample {

/// Brute-force machinery, independent of the counting tables and of the
/// sampler, used to cross-check both.

/// All distinct words of one length with their weights, sorted by the
/// terminal names.
struct LanguageSlice {
  std::size_t n = 0;
  std::vector<Word> words;
  std::vector<mpz_class> weights;

  mpz_class total_weight() const;
};

inline constexpr std::size_t kEnumerationLimit = 14;

/// Exhaustive derivation with memoized word sets per (non-terminal, length).
/// Throws OracleError when n > kEnumerationLimit.
LanguageSlice enumerate_language(const CnfGrammar& cnf, std::size_t n);

/// Membership in the source grammar (epsilon rules included) by a span
/// fixpoint; does not go through normalization.
bool source_derives(const WeightedGrammar& g, const Word& word);

/// Every string of length n over the source alphabet that source_derives
/// accepts, in the same order as enumerate_language. Throws OracleError when
/// |alphabet|^n exceeds a few million.
std::vector<Word> enumerate_source_language(const WeightedGrammar& g, std::size_t n);

/// Product of the source rational weights.
mpq_class source_weight(const WeightedGrammar& g, const Word& word);

/// Orders words by comparing terminal names position by position.
bool word_less(const std::vector<std::string>& terminals, const Word& a, const Word& b);

struct AmbiguityRow {
  std::size_t n;
  mpz_class derivations;  // unit-weight count table entry at the axiom
  std::size_t distinct;   // distinct words found by enumeration
  bool equal() const { return derivations == distinct; }
};

/// Unit-weight derivation counts against distinct-word counts for every
/// length up to n_max. A mismatch certifies ambiguity; agreement is only
/// evidence of unambiguity.
std::vector<AmbiguityRow> check_unambiguous_up_to(const CnfGrammar& cnf, std::size_t n_max);

struct ChiSquareResult {
  double statistic = 0;
  double p_value = 1;
  std::size_t degrees_of_freedom = 0;
};

/// Pearson goodness of fit of observed counts against exact probabilities
/// (keys are rendered words). Throws OracleError with fewer than 50 samples
/// per word on average or when a word with zero probability was observed.
ChiSquareResult empirical_distribution_test(const std::map<std::string, std::uint64_t>& counts,
                                            const std::map<std::string, mpq_class>& exact);

/// Upper tail of the chi-square distribution, Q(dof / 2, x / 2).
double chi_square_survival(double statistic, double degrees_of_freedom);

}  // namespace nrsample
