#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "nrsample/grammar.hpp"

namespace nrsample {

struct UnionRule {
  NonTerminalId left;
  NonTerminalId right;
};

struct ProductRule {
  NonTerminalId left;
  NonTerminalId right;
};

struct TerminalRule {
  TerminalId terminal;
};

using CnfRule = std::variant<UnionRule, ProductRule, TerminalRule>;

/// Where a CNF non-terminal came from, for display and diagnostics.
struct Origin {
  enum class Kind : std::uint8_t {
    SourceNonTerminal,  // a non-terminal of the user grammar
    UnionChain,         // inner node of a right-combed alternative chain
    ProductChain,       // inner node of a right-combed body chain
    TerminalWrapper,    // X -> t for a terminal inside a longer body
    FreshAxiom,         // copy of the axiom rule, introduced for the epsilon condition
  };
  Kind kind;
  NonTerminalId source = 0;     // source non-terminal (unused for wrappers)
  std::size_t alternative = 0;  // epsilon-free alternative index
  std::size_t position = 0;     // body position where the chain node starts
};

/// A grammar in Chomsky Normal Form: every non-terminal carries exactly one
/// binary union, binary product or terminal rule. Epsilon is represented by
/// the `axiom_derives_epsilon` flag only, and then the axiom occurs in no body.
struct CnfGrammar {
  std::vector<std::string> non_terminals;  // display names
  std::vector<CnfRule> rule_of;
  NonTerminalId axiom = 0;
  bool axiom_derives_epsilon = false;

  std::vector<std::string> terminals;
  std::vector<mpz_class> int_weights;  // source weights times weight_scale
  mpz_class weight_scale = 1;          // lcm of the weight denominators
  std::vector<Origin> origin_map;

  /// Every non-terminal once, union children before their parents.
  std::vector<NonTerminalId> eval_order;

  std::size_t size() const { return rule_of.size(); }
  bool single_char_terminals() const;
};

/// Epsilon elimination, right-combed union/product chains in source order,
/// shared terminal wrappers, and a fresh axiom when the epsilon condition
/// requires one. Preserves the language and every word's weight (up to the
/// global `weight_scale^n` factor).
///
/// Throws GrammarError (CyclicUnitRules) when unit derivations form a cycle,
/// which makes the derivation count infinite, and (EpsilonOnlyLanguage) when
/// the grammar generates nothing but the empty word.
CnfGrammar normalize_to_cnf(const WeightedGrammar& g);

/// Returns a description of every structural violation; empty when valid.
std::vector<std::string> validate_cnf(const CnfGrammar& cnf);

std::string to_text(const CnfGrammar& cnf);

/// Terminal lookup by token; returns false when the token is unknown.
bool find_terminal(const CnfGrammar& cnf, std::string_view token, TerminalId& out);

}  // namespace nrsample
