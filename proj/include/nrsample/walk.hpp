#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nrsample/cnf.hpp"
#include "nrsample/counting.hpp"
#include "nrsample/walk_step.hpp"

namespace nrsample {

/// The leftmost derivation policy: index of the first non-terminal, or
/// nullopt for a mature word.
std::optional<std::size_t> leftmost_cursor(const SizedWord& word);

/// Replays a walk from (axiom, walk.n). Throws WalkError when a step does not
/// fit (IllegalStep), when the walk stops early (TruncatedWalk) or when steps
/// remain after the word is mature (OverlongWalk).
Word replay(const CnfGrammar& cnf, const CountTable& table, const ParseWalk& walk);

/// CYK recognition followed by a leftmost top-down extraction of the unique
/// walk. Throws WalkError(NotInLanguage) for foreign words and
/// WalkError(AmbiguityDetected) when a cell on the extraction path admits
/// two decompositions. O(n^3 |rules|).
ParseWalk parse_word(const CnfGrammar& cnf, const Word& word);

/// Concatenated for single-character alphabets, space separated otherwise.
/// The empty word renders as "_".
std::string render_word(const CnfGrammar& cnf, const Word& word);

/// Inverse of render_word. Whitespace separates tokens when present;
/// otherwise single-character alphabets are split per character. Throws
/// WalkError(UnknownTerminal).
Word read_word(const CnfGrammar& cnf, std::string_view text);

struct ForbiddenLine {
  std::size_t line;
  std::string text;
};

/// Non-blank lines of a forbidden-set file with `#` comments removed.
std::vector<ForbiddenLine> read_forbidden_lines(std::string_view text);

/// "L", "R", "S<i>" and "T:<terminal>".
std::string render_step(const CnfGrammar& cnf, const WalkStep& step);
std::string render_walk(const CnfGrammar& cnf, const ParseWalk& walk);

}  // namespace nrsample
