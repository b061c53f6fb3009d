#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace nrsample {

using TerminalId = std::uint32_t;
using NonTerminalId = std::uint32_t;

/// A symbol of a source grammar body: a terminal (index into
/// `WeightedGrammar::terminals`) or a non-terminal.
struct Symbol {
  enum class Kind : std::uint8_t { Terminal, NonTerminal };
  Kind kind;
  std::uint32_t id;

  static Symbol terminal(TerminalId t) { return {Kind::Terminal, t}; }
  static Symbol non_terminal(NonTerminalId a) { return {Kind::NonTerminal, a}; }
  bool is_terminal() const { return kind == Kind::Terminal; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

using Body = std::vector<Symbol>;

/// A context-free grammar as written by the user, with positive rational
/// terminal weights. Bodies may be empty (epsilon).
struct WeightedGrammar {
  std::vector<std::string> non_terminals;
  std::vector<std::vector<Body>> rules;  // rules[a] = alternatives of a
  NonTerminalId axiom = 0;
  std::vector<std::string> terminals;
  std::vector<mpq_class> weights;  // parallel to terminals, canonical, > 0

  std::size_t terminal_count() const { return terminals.size(); }
  std::size_t non_terminal_count() const { return non_terminals.size(); }
};

/// Parses the line-oriented grammar format:
///
///     # comment
///     S -> a S b S | c S | _ ;
///     weight c 2
///
/// Statements end at `;` or at the end of a line. Heads start with an
/// uppercase letter, `_` is the empty word, `weight <t> <p>[/<q>]` sets a
/// terminal weight (decimal literals such as `0.5` are also accepted).
/// Repeated heads append alternatives. The first head is the axiom.
///
/// Throws GrammarError on syntax errors, undeclared symbols, non-positive
/// weights and unproductive or unreachable non-terminals.
WeightedGrammar parse_grammar(std::string_view text);

/// Renders a grammar back to the file format.
std::string to_text(const WeightedGrammar& g);

bool is_non_terminal_name(std::string_view token);

}  // namespace nrsample
