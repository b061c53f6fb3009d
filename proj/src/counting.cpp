#include "nrsample/counting.hpp"

#include <algorithm>
#include <stdexcept>

#include "nrsample/errors.hpp"

namespace nrsample {

std::vector<mpz_class> unit_weights(const CnfGrammar& cnf) {
  return std::vector<mpz_class>(cnf.terminals.size(), mpz_class(1));
}

mpz_class word_weight(const CnfGrammar& cnf, const Word& word) {
  mpz_class w = 1;
  for (TerminalId t : word) w *= cnf.int_weights[t];
  return w;
}

CountTable build_count_table(const CnfGrammar& cnf, std::size_t n, ArithmeticCounter* ops) {
  return build_count_table(cnf, n, cnf.int_weights, ops);
}

CountTable build_count_table(const CnfGrammar& cnf, std::size_t n, std::span<const mpz_class> terminal_weights,
                             ArithmeticCounter* ops) {
  if (terminal_weights.size() != cnf.terminals.size()) {
    throw std::invalid_argument("one weight per terminal is required");
  }
  CountTable table;
  table.max_length_ = n;
  table.non_terminals_ = cnf.size();
  table.cells_.assign(cnf.size() * (n + 1), mpz_class(0));
  table.terminal_weights_.assign(terminal_weights.begin(), terminal_weights.end());
  if (cnf.axiom_derives_epsilon) table.cell(cnf.axiom, 0) = 1;

  // Lengths >= 1 with a non-zero entry, ascending.
  std::vector<std::vector<std::size_t>> support(cnf.size());
  auto below = [&](NonTerminalId a, std::size_t m) {
    const auto& s = support[a];
    return static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), m) - s.begin());
  };

  for (std::size_t m = 1; m <= n; ++m) {
    for (NonTerminalId a : cnf.eval_order) {
      mpz_class& out = table.cell(a, m);
      if (const auto* t = std::get_if<TerminalRule>(&cnf.rule_of[a])) {
        if (m == 1) out = table.terminal_weights_[t->terminal];
      } else if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
        out = table.at(u->left, m) + table.at(u->right, m);
        count_add(ops);
      } else {
        const auto& p = std::get<ProductRule>(cnf.rule_of[a]);
        const std::size_t left_terms = below(p.left, m);
        const std::size_t right_terms = below(p.right, m);
        const bool scan_left = left_terms <= right_terms;
        const auto& lengths = support[scan_left ? p.left : p.right];
        const std::size_t terms = scan_left ? left_terms : right_terms;
        for (std::size_t k = 0; k < terms; ++k) {
          const std::size_t i = scan_left ? lengths[k] : m - lengths[k];
          const mpz_class& rhs = table.at(p.right, m - i);
          const mpz_class& lhs = table.at(p.left, i);
          if (lhs == 0 || rhs == 0) continue;
          mpz_addmul(out.get_mpz_t(), lhs.get_mpz_t(), rhs.get_mpz_t());
          count_mul(ops);
          count_add(ops);
        }
      }
      if (out != 0) support[a].push_back(m);
    }
  }
  return table;
}

bool CountTable::verify(const CnfGrammar& cnf) const {
  if (non_terminals_ != cnf.size()) return false;
  for (NonTerminalId a = 0; a < cnf.size(); ++a) {
    const mpz_class expected_zero = (a == cnf.axiom && cnf.axiom_derives_epsilon) ? 1 : 0;
    if (at(a, 0) != expected_zero) return false;
    for (std::size_t m = 1; m <= max_length_; ++m) {
      mpz_class expected = 0;
      if (const auto* t = std::get_if<TerminalRule>(&cnf.rule_of[a])) {
        if (m == 1) expected = terminal_weights_[t->terminal];
      } else if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
        expected = at(u->left, m) + at(u->right, m);
      } else {
        const auto& p = std::get<ProductRule>(cnf.rule_of[a]);
        for (std::size_t i = 1; i < m; ++i) expected += at(p.left, i) * at(p.right, m - i);
      }
      if (at(a, m) != expected) return false;
    }
  }
  return true;
}

SizedWord SizedWord::from_symbols(const std::vector<SizedSymbol>& symbols, const CountTable& table) {
  SizedWord word;
  std::size_t first_nt = symbols.size();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i].symbol.is_terminal()) {
      if (symbols[i].length != 1) throw std::invalid_argument("terminal symbols have length 1");
    } else if (first_nt == symbols.size()) {
      first_nt = i;
    }
  }
  for (std::size_t i = 0; i < first_nt; ++i) word.prefix_.push_back(symbols[i].symbol.id);
  for (std::size_t i = symbols.size(); i > first_nt; --i) word.pending_.push_back(symbols[i - 1]);
  word.weight_ = word.recompute_weight(table);
  return word;
}

std::vector<SizedSymbol> SizedWord::symbols() const {
  std::vector<SizedSymbol> out;
  out.reserve(prefix_.size() + pending_.size());
  for (TerminalId t : prefix_) out.push_back({Symbol::terminal(t), 1});
  for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) out.push_back(*it);
  return out;
}

std::size_t SizedWord::target_length() const {
  std::size_t total = prefix_.size();
  for (const auto& s : pending_) total += s.length;
  return total;
}

mpz_class SizedWord::recompute_weight(const CountTable& table) const {
  mpz_class w = 1;
  for (TerminalId t : prefix_) w *= table.terminal_weight(t);
  for (const auto& s : pending_) {
    w *= s.symbol.is_terminal() ? table.terminal_weight(s.symbol.id) : table.at(s.symbol.id, s.length);
  }
  return w;
}

void SizedWord::settle() {
  while (!pending_.empty() && pending_.back().symbol.is_terminal()) {
    prefix_.push_back(pending_.back().symbol.id);
    pending_.pop_back();
  }
}

SizedWord initial_word_unchecked(const CnfGrammar& cnf, const CountTable& table, std::size_t n) {
  if (n > table.max_length()) throw std::out_of_range("length exceeds the count table");
  SizedWord word;
  if (n > 0) word.pending_.push_back({Symbol::non_terminal(cnf.axiom), n});
  word.weight_ = table.at(cnf.axiom, n);
  return word;
}

SizedWord sized_word_initial(const CnfGrammar& cnf, const CountTable& table, std::size_t n) {
  SizedWord word = initial_word_unchecked(cnf, table, n);
  if (word.weight() == 0) {
    throw ExhaustionError("the language has no word of length " + std::to_string(n));
  }
  return word;
}

void apply_derivation_in_place(const CnfGrammar& cnf, const CountTable& table, SizedWord& word,
                               const WalkStep& step, ArithmeticCounter* ops, const mpz_class* known_weight) {
  if (word.mature()) throw WalkError(WalkErrorKind::IllegalStep, "derivation applied to a mature word");
  const SizedSymbol top = word.pending_.back();
  const NonTerminalId a = top.symbol.id;
  const std::size_t m = top.length;
  const CnfRule& rule = cnf.rule_of[a];
  const mpz_class& current = table.at(a, m);

  auto illegal = [&](const std::string& why) {
    throw WalkError(WalkErrorKind::IllegalStep, "'" + cnf.non_terminals[a] + "' of length " + std::to_string(m) +
                                                    ": " + why);
  };

  if (const auto* t = std::get_if<TerminalRule>(&rule)) {
    if (step.kind != WalkStep::Kind::Emit || step.value != t->terminal) illegal("expected its terminal");
    if (m != 1) illegal("a terminal rule needs length 1");
    word.pending_.pop_back();
    word.prefix_.push_back(t->terminal);
    word.settle();
    return;
  }

  if (const auto* u = std::get_if<UnionRule>(&rule)) {
    if (step.kind != WalkStep::Kind::UnionLeft && step.kind != WalkStep::Kind::UnionRight) {
      illegal("expected a union choice");
    }
    const NonTerminalId chosen = step.kind == WalkStep::Kind::UnionLeft ? u->left : u->right;
    if (known_weight) {
      word.weight_ = *known_weight;
    } else if (current == 0) {
      word.weight_ = 0;
    } else {
      word.weight_ *= table.at(chosen, m);
      mpz_divexact(word.weight_.get_mpz_t(), word.weight_.get_mpz_t(), current.get_mpz_t());
      count_mul(ops);
      count_div(ops);
    }
    word.pending_.back() = {Symbol::non_terminal(chosen), m};
    return;
  }

  const auto& p = std::get<ProductRule>(rule);
  if (step.kind != WalkStep::Kind::ProductSplit) illegal("expected a product split");
  const std::size_t i = step.value;
  if (i < 1 || i + 1 > m) illegal("split " + std::to_string(i) + " outside [1, m-1]");
  if (known_weight) {
    word.weight_ = *known_weight;
  } else if (current == 0) {
    word.weight_ = 0;
  } else {
    word.weight_ *= table.at(p.left, i);
    word.weight_ *= table.at(p.right, m - i);
    mpz_divexact(word.weight_.get_mpz_t(), word.weight_.get_mpz_t(), current.get_mpz_t());
    count_mul(ops, 2);
    count_div(ops);
  }
  word.pending_.back() = {Symbol::non_terminal(p.right), m - i};
  word.pending_.push_back({Symbol::non_terminal(p.left), i});
}

SizedWord apply_derivation(const CnfGrammar& cnf, const CountTable& table, const SizedWord& word,
                           const WalkStep& step, ArithmeticCounter* ops) {
  SizedWord next = word;
  apply_derivation_in_place(cnf, table, next, step, ops);
  return next;
}

}  // namespace nrsample
