#include "nrsample/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "nrsample/errors.hpp"

namespace nrsample {

std::string_view to_string(GrammarErrorKind kind) {
  switch (kind) {
    case GrammarErrorKind::Syntax: return "syntax error";
    case GrammarErrorKind::UndeclaredSymbol: return "undeclared symbol";
    case GrammarErrorKind::NonPositiveWeight: return "non-positive weight";
    case GrammarErrorKind::UnproductiveNonTerminal: return "unproductive non-terminal";
    case GrammarErrorKind::UnreachableNonTerminal: return "unreachable non-terminal";
    case GrammarErrorKind::CyclicUnitRules: return "cyclic unit rules";
    case GrammarErrorKind::EpsilonOnlyLanguage: return "language contains only the empty word";
  }
  return "grammar error";
}

namespace {

std::string located(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  std::ostringstream os;
  os << line << ':' << column << ": " << message;
  return os.str();
}

}  // namespace

GrammarError::GrammarError(GrammarErrorKind kind, const std::string& message, std::size_t line,
                           std::size_t column)
    : std::runtime_error(located(std::string(to_string(kind)) + ": " + message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

bool is_non_terminal_name(std::string_view token) {
  if (token.empty() || !std::isupper(static_cast<unsigned char>(token.front()))) return false;
  for (char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '\'') return false;
  }
  return true;
}

namespace {

struct Token {
  enum class Kind { Word, Arrow, Bar, Semi, Newline, End };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t count) {
    for (std::size_t j = 0; j < count; ++j) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      out.push_back({Token::Kind::Newline, "\n", line, column});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '|') {
      out.push_back({Token::Kind::Bar, "|", line, column});
      advance(1);
      continue;
    }
    if (c == ';') {
      out.push_back({Token::Kind::Semi, ";", line, column});
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "->") {
      out.push_back({Token::Kind::Arrow, "->", line, column});
      advance(2);
      continue;
    }
    Token word{Token::Kind::Word, {}, line, column};
    while (i < text.size()) {
      char d = text[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '|' || d == ';' || d == '#' ||
          text.substr(i, 2) == "->") {
        break;
      }
      word.text.push_back(d);
      advance(1);
    }
    out.push_back(std::move(word));
  }
  out.push_back({Token::Kind::End, "", line, column});
  return out;
}

bool ends_statement(const Token& t) {
  return t.kind == Token::Kind::Semi || t.kind == Token::Kind::Newline ||
         t.kind == Token::Kind::End;
}

[[noreturn]] void fail(GrammarErrorKind kind, const std::string& message, const Token& at) {
  throw GrammarError(kind, message, at.line, at.column);
}

// Accepts "p", "p/q" and "d.ddd". Returns nullopt on malformed input.
std::optional<mpq_class> parse_weight_literal(const std::string& text, bool& negative) {
  negative = false;
  std::string body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.erase(body.begin());
  }
  auto all_digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class d(den, 10);
    if (d == 0) return std::nullopt;
    mpq_class q(mpz_class(num, 10), d);
    q.canonicalize();
    return q;
  }
  if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string whole = body.substr(0, dot), frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
    mpz_class scale = 1;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpq_class q(mpz_class(whole + frac, 10), scale);
    q.canonicalize();
    return q;
  }
  if (!all_digits(body)) return std::nullopt;
  return mpq_class(mpz_class(body, 10));
}

}  // namespace

WeightedGrammar parse_grammar(std::string_view text) {
  const std::vector<Token> tokens = tokenize(text);

  struct PendingSymbol {
    std::string name;
    Token where;
  };
  struct PendingRule {
    std::string head;
    Token where;
    std::vector<std::vector<PendingSymbol>> bodies;
  };
  struct PendingWeight {
    std::string terminal;
    mpq_class value;
    Token where;
  };
  std::vector<PendingRule> pending_rules;
  std::vector<PendingWeight> pending_weights;

  std::size_t pos = 0;
  while (tokens[pos].kind != Token::Kind::End) {
    const Token& first = tokens[pos];
    if (ends_statement(first)) {
      ++pos;
      continue;
    }
    if (first.kind != Token::Kind::Word) fail(GrammarErrorKind::Syntax, "unexpected '" + first.text + "'", first);

    if (first.text == "weight" && tokens[pos + 1].kind != Token::Kind::Arrow) {
      const Token& name = tokens[pos + 1];
      const Token& value = tokens[pos + 2];
      if (name.kind != Token::Kind::Word || value.kind != Token::Kind::Word) {
        fail(GrammarErrorKind::Syntax, "expected 'weight <terminal> <value>'", first);
      }
      if (!ends_statement(tokens[pos + 3])) {
        fail(GrammarErrorKind::Syntax, "trailing tokens after weight", tokens[pos + 3]);
      }
      bool negative = false;
      auto parsed = parse_weight_literal(value.text, negative);
      if (!parsed) fail(GrammarErrorKind::Syntax, "malformed weight '" + value.text + "'", value);
      if (negative || *parsed <= 0) {
        fail(GrammarErrorKind::NonPositiveWeight, "weight of '" + name.text + "' must be > 0", value);
      }
      pending_weights.push_back({name.text, *parsed, name});
      pos += 3;
      continue;
    }

    if (!is_non_terminal_name(first.text)) {
      fail(GrammarErrorKind::Syntax, "rule head '" + first.text + "' is not a non-terminal name", first);
    }
    if (tokens[pos + 1].kind != Token::Kind::Arrow) {
      fail(GrammarErrorKind::Syntax, "expected '->' after '" + first.text + "'", tokens[pos + 1]);
    }
    PendingRule rule{first.text, first, {}};
    pos += 2;
    std::vector<PendingSymbol> body;
    bool epsilon = false;
    for (;;) {
      const Token& t = tokens[pos];
      if (t.kind == Token::Kind::Word) {
        if (t.text == "_") {
          if (!body.empty() || epsilon) fail(GrammarErrorKind::Syntax, "'_' must stand alone in its alternative", t);
          epsilon = true;
        } else {
          if (epsilon) fail(GrammarErrorKind::Syntax, "'_' must stand alone in its alternative", t);
          if (t.text.find('_') != std::string::npos) {
            fail(GrammarErrorKind::Syntax, "'_' is reserved and cannot appear in '" + t.text + "'", t);
          }
          body.push_back({t.text, t});
        }
        ++pos;
        continue;
      }
      if (t.kind == Token::Kind::Arrow) fail(GrammarErrorKind::Syntax, "unexpected '->'", t);
      if (body.empty() && !epsilon) fail(GrammarErrorKind::Syntax, "empty alternative (write '_' for epsilon)", t);
      rule.bodies.push_back(std::move(body));
      body.clear();
      epsilon = false;
      if (t.kind == Token::Kind::Bar) {
        ++pos;
        continue;
      }
      break;
    }
    pending_rules.push_back(std::move(rule));
  }

  if (pending_rules.empty()) {
    throw GrammarError(GrammarErrorKind::Syntax, "grammar has no rules");
  }

  WeightedGrammar g;
  std::map<std::string, NonTerminalId> nt_index;
  for (const auto& rule : pending_rules) {
    if (nt_index.emplace(rule.head, static_cast<NonTerminalId>(g.non_terminals.size())).second) {
      g.non_terminals.push_back(rule.head);
      g.rules.emplace_back();
    }
  }
  g.axiom = 0;

  std::map<std::string, TerminalId> t_index;
  for (const auto& rule : pending_rules) {
    auto& alternatives = g.rules[nt_index.at(rule.head)];
    for (const auto& pending_body : rule.bodies) {
      Body body;
      for (const auto& s : pending_body) {
        if (is_non_terminal_name(s.name)) {
          auto it = nt_index.find(s.name);
          if (it == nt_index.end()) {
            fail(GrammarErrorKind::UndeclaredSymbol, "non-terminal '" + s.name + "' has no rule", s.where);
          }
          body.push_back(Symbol::non_terminal(it->second));
        } else {
          auto [it, inserted] = t_index.emplace(s.name, static_cast<TerminalId>(g.terminals.size()));
          if (inserted) g.terminals.push_back(s.name);
          body.push_back(Symbol::terminal(it->second));
        }
      }
      alternatives.push_back(std::move(body));
    }
  }

  g.weights.assign(g.terminals.size(), mpq_class(1));
  std::vector<bool> weight_set(g.terminals.size(), false);
  for (const auto& w : pending_weights) {
    auto it = t_index.find(w.terminal);
    if (it == t_index.end()) {
      fail(GrammarErrorKind::UndeclaredSymbol, "weight given for unused terminal '" + w.terminal + "'", w.where);
    }
    if (weight_set[it->second]) {
      fail(GrammarErrorKind::Syntax, "duplicate weight for '" + w.terminal + "'", w.where);
    }
    weight_set[it->second] = true;
    g.weights[it->second] = w.value;
  }

  // Productive: least fixpoint of "some alternative uses only productive symbols".
  const std::size_t count = g.non_terminals.size();
  std::vector<bool> productive(count, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < count; ++a) {
      if (productive[a]) continue;
      for (const auto& body : g.rules[a]) {
        bool ok = true;
        for (const auto& s : body) {
          if (!s.is_terminal() && !productive[s.id]) {
            ok = false;
            break;
          }
        }
        if (ok) {
          productive[a] = changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    if (!productive[a]) {
      const auto& rule = *std::find_if(pending_rules.begin(), pending_rules.end(),
                                       [&](const PendingRule& r) { return r.head == g.non_terminals[a]; });
      fail(GrammarErrorKind::UnproductiveNonTerminal,
           "'" + g.non_terminals[a] + "' derives no finite word", rule.where);
    }
  }

  std::vector<bool> reachable(count, false);
  std::vector<NonTerminalId> stack{g.axiom};
  reachable[g.axiom] = true;
  while (!stack.empty()) {
    NonTerminalId a = stack.back();
    stack.pop_back();
    for (const auto& body : g.rules[a]) {
      for (const auto& s : body) {
        if (!s.is_terminal() && !reachable[s.id]) {
          reachable[s.id] = true;
          stack.push_back(s.id);
        }
      }
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    if (!reachable[a]) {
      const auto& rule = *std::find_if(pending_rules.begin(), pending_rules.end(),
                                       [&](const PendingRule& r) { return r.head == g.non_terminals[a]; });
      fail(GrammarErrorKind::UnreachableNonTerminal,
           "'" + g.non_terminals[a] + "' is not reachable from '" + g.non_terminals[g.axiom] + "'", rule.where);
    }
  }
  return g;
}

std::string to_text(const WeightedGrammar& g) {
  std::ostringstream os;
  auto emit_rule = [&](std::size_t a) {
    os << g.non_terminals[a] << " ->";
    for (std::size_t k = 0; k < g.rules[a].size(); ++k) {
      if (k > 0) os << " |";
      if (g.rules[a][k].empty()) os << " _";
      for (const auto& s : g.rules[a][k]) {
        os << ' ' << (s.is_terminal() ? g.terminals[s.id] : g.non_terminals[s.id]);
      }
    }
    os << " ;\n";
  };
  emit_rule(g.axiom);
  for (std::size_t a = 0; a < g.non_terminals.size(); ++a) {
    if (a != g.axiom) emit_rule(a);
  }
  for (std::size_t t = 0; t < g.terminals.size(); ++t) {
    if (g.weights[t] != 1) os << "weight " << g.terminals[t] << ' ' << g.weights[t].get_str() << '\n';
  }
  return os.str();
}

}  // namespace nrsample
