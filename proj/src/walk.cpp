#include "nrsample/walk.hpp"

#include <cctype>
#include <sstream>

#include "nrsample/errors.hpp"

namespace nrsample {

std::string_view to_string(WalkErrorKind kind) {
  switch (kind) {
    case WalkErrorKind::IllegalStep: return "illegal step";
    case WalkErrorKind::TruncatedWalk: return "truncated walk";
    case WalkErrorKind::OverlongWalk: return "overlong walk";
    case WalkErrorKind::NotInLanguage: return "not in language";
    case WalkErrorKind::AmbiguityDetected: return "ambiguity detected";
    case WalkErrorKind::UnknownTerminal: return "unknown terminal";
  }
  return "walk error";
}

std::optional<std::size_t> leftmost_cursor(const SizedWord& word) { return word.cursor(); }

Word replay(const CnfGrammar& cnf, const CountTable& table, const ParseWalk& walk) {
  if (walk.n == 0 && !cnf.axiom_derives_epsilon) {
    throw WalkError(WalkErrorKind::NotInLanguage, "the grammar does not derive the empty word");
  }
  SizedWord word = initial_word_unchecked(cnf, table, walk.n);
  for (std::size_t k = 0; k < walk.steps.size(); ++k) {
    if (word.mature()) {
      throw WalkError(WalkErrorKind::OverlongWalk,
                      std::to_string(walk.steps.size() - k) + " step(s) left after the word matured");
    }
    apply_derivation_in_place(cnf, table, word, walk.steps[k]);
  }
  if (!word.mature()) throw WalkError(WalkErrorKind::TruncatedWalk, "walk ended on an immature word");
  return Word(word.prefix().begin(), word.prefix().end());
}

ParseWalk parse_word(const CnfGrammar& cnf, const Word& word) {
  const std::size_t n = word.size();
  ParseWalk walk;
  walk.n = n;
  if (n == 0) {
    if (!cnf.axiom_derives_epsilon) throw WalkError(WalkErrorKind::NotInLanguage, "the empty word is not derivable");
    return walk;
  }
  const std::size_t count = cnf.size();
  // derives[((i * (n + 1)) + len) * count + a]: a =>* word[i, i + len)
  std::vector<char> derives((n + 1) * (n + 1) * count, 0);
  auto cell = [&](std::size_t i, std::size_t len, NonTerminalId a) -> char& {
    return derives[(i * (n + 1) + len) * count + a];
  };

  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      for (NonTerminalId a : cnf.eval_order) {
        char ok = 0;
        if (const auto* t = std::get_if<TerminalRule>(&cnf.rule_of[a])) {
          ok = len == 1 && word[i] == t->terminal;
        } else if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
          ok = cell(i, len, u->left) || cell(i, len, u->right);
        } else {
          const auto& p = std::get<ProductRule>(cnf.rule_of[a]);
          for (std::size_t k = 1; k < len && !ok; ++k) ok = cell(i, k, p.left) && cell(i + k, len - k, p.right);
        }
        cell(i, len, a) = ok;
      }
    }
  }
  if (!cell(0, n, cnf.axiom)) {
    throw WalkError(WalkErrorKind::NotInLanguage, "'" + render_word(cnf, word) + "' is not in the language");
  }

  struct Frame {
    NonTerminalId a;
    std::size_t i;
    std::size_t len;
  };
  std::vector<Frame> stack{{cnf.axiom, 0, n}};
  auto ambiguous = [&](const Frame& f) {
    throw WalkError(WalkErrorKind::AmbiguityDetected, "'" + cnf.non_terminals[f.a] + "' derives positions [" +
                                                          std::to_string(f.i) + ", " + std::to_string(f.i + f.len) +
                                                          ") in more than one way");
  };
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (const auto* t = std::get_if<TerminalRule>(&cnf.rule_of[f.a])) {
      walk.steps.push_back(WalkStep::emit(t->terminal));
    } else if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[f.a])) {
      const bool left = cell(f.i, f.len, u->left);
      const bool right = cell(f.i, f.len, u->right);
      if (left && right) ambiguous(f);
      walk.steps.push_back(left ? WalkStep::union_left() : WalkStep::union_right());
      stack.push_back({left ? u->left : u->right, f.i, f.len});
    } else {
      const auto& p = std::get<ProductRule>(cnf.rule_of[f.a]);
      std::size_t chosen = 0;
      for (std::size_t k = 1; k < f.len; ++k) {
        if (cell(f.i, k, p.left) && cell(f.i + k, f.len - k, p.right)) {
          if (chosen != 0) ambiguous(f);
          chosen = k;
        }
      }
      walk.steps.push_back(WalkStep::split(static_cast<std::uint32_t>(chosen)));
      stack.push_back({p.right, f.i + chosen, f.len - chosen});
      stack.push_back({p.left, f.i, chosen});
    }
  }
  return walk;
}

std::string render_word(const CnfGrammar& cnf, const Word& word) {
  if (word.empty()) return "_";
  const bool compact = cnf.single_char_terminals();
  std::string out;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (!compact && k > 0) out.push_back(' ');
    out += cnf.terminals[word[k]];
  }
  return out;
}

Word read_word(const CnfGrammar& cnf, std::string_view text) {
  std::vector<std::string> tokens;
  bool has_space = false;
  for (char c : text) has_space |= std::isspace(static_cast<unsigned char>(c)) != 0;
  if (has_space) {
    std::istringstream in{std::string(text)};
    for (std::string tok; in >> tok;) tokens.push_back(tok);
  } else if (cnf.single_char_terminals() && text != "_") {
    for (char c : text) tokens.emplace_back(1, c);
  } else {
    tokens.emplace_back(text);
  }
  Word word;
  if (tokens.size() == 1 && tokens[0] == "_") return word;
  for (const auto& tok : tokens) {
    TerminalId t;
    if (!find_terminal(cnf, tok, t)) throw WalkError(WalkErrorKind::UnknownTerminal, "unknown terminal '" + tok + "'");
    word.push_back(t);
  }
  return word;
}

std::vector<ForbiddenLine> read_forbidden_lines(std::string_view text) {
  std::vector<ForbiddenLine> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (!line.empty()) out.push_back({line_no, std::string(line)});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string render_step(const CnfGrammar& cnf, const WalkStep& step) {
  switch (step.kind) {
    case WalkStep::Kind::UnionLeft: return "L";
    case WalkStep::Kind::UnionRight: return "R";
    case WalkStep::Kind::ProductSplit: return "S" + std::to_string(step.value);
    case WalkStep::Kind::Emit: return "T:" + cnf.terminals[step.value];
  }
  return "?";
}

std::string render_walk(const CnfGrammar& cnf, const ParseWalk& walk) {
  std::string out;
  for (std::size_t k = 0; k < walk.steps.size(); ++k) {
    if (k > 0) out.push_back(' ');
    out += render_step(cnf, walk.steps[k]);
  }
  return out;
}

}  // namespace nrsample
