#include "nrsample/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "nrsample/counting.hpp"
#include "nrsample/errors.hpp"

namespace nrsample {

mpz_class LanguageSlice::total_weight() const {
  mpz_class total = 0;
  for (const auto& w : weights) total += w;
  return total;
}

bool word_less(const std::vector<std::string>& terminals, const Word& a, const Word& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [&](TerminalId x, TerminalId y) { return terminals[x] < terminals[y]; });
}

LanguageSlice enumerate_language(const CnfGrammar& cnf, std::size_t n) {
  if (n > kEnumerationLimit) {
    throw OracleError("enumeration is limited to n <= " + std::to_string(kEnumerationLimit));
  }
  std::vector<std::vector<std::optional<std::set<Word>>>> memo(cnf.size(),
                                                                std::vector<std::optional<std::set<Word>>>(n + 1));
  auto words_of = [&](auto&& self, NonTerminalId a, std::size_t m) -> const std::set<Word>& {
    auto& slot = memo[a][m];
    if (slot) return *slot;
    std::set<Word> out;
    if (m > 0) {
      if (const auto* t = std::get_if<TerminalRule>(&cnf.rule_of[a])) {
        if (m == 1) out.insert(Word{t->terminal});
      } else if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
        const auto& left = self(self, u->left, m);
        const auto& right = self(self, u->right, m);
        out.insert(left.begin(), left.end());
        out.insert(right.begin(), right.end());
      } else {
        const auto& p = std::get<ProductRule>(cnf.rule_of[a]);
        for (std::size_t i = 1; i < m; ++i) {
          const auto& left = self(self, p.left, i);
          if (left.empty()) continue;
          const auto& right = self(self, p.right, m - i);
          for (const auto& x : left) {
            for (const auto& y : right) {
              Word w = x;
              w.insert(w.end(), y.begin(), y.end());
              out.insert(std::move(w));
            }
          }
        }
      }
    }
    slot = std::move(out);
    return *slot;
  };

  LanguageSlice slice;
  slice.n = n;
  if (n == 0) {
    if (cnf.axiom_derives_epsilon) slice.words.emplace_back();
  } else {
    const auto& all = words_of(words_of, cnf.axiom, n);
    slice.words.assign(all.begin(), all.end());
  }
  std::sort(slice.words.begin(), slice.words.end(),
            [&](const Word& a, const Word& b) { return word_less(cnf.terminals, a, b); });
  for (const auto& w : slice.words) slice.weights.push_back(word_weight(cnf, w));
  return slice;
}

bool source_derives(const WeightedGrammar& g, const Word& word) {
  const std::size_t n = word.size();
  const std::size_t count = g.non_terminal_count();
  std::vector<char> derives(count * (n + 1) * (n + 1), 0);
  auto d = [&](NonTerminalId a, std::size_t i, std::size_t j) -> char& {
    return derives[(a * (n + 1) + i) * (n + 1) + j];
  };
  auto matches = [&](const Body& body, std::size_t i, std::size_t j) {
    std::vector<char> reach(n + 1, 0), next(n + 1, 0);
    reach[i] = 1;
    for (const auto& s : body) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t p = i; p <= j; ++p) {
        if (!reach[p]) continue;
        if (s.is_terminal()) {
          if (p < j && word[p] == s.id) next[p + 1] = 1;
        } else {
          for (std::size_t q = p; q <= j; ++q) {
            if (d(s.id, p, q)) next[q] = 1;
          }
        }
      }
      reach.swap(next);
    }
    return reach[j] != 0;
  };
  for (std::size_t len = 0; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      for (bool changed = true; changed;) {
        changed = false;
        for (NonTerminalId a = 0; a < count; ++a) {
          if (d(a, i, j)) continue;
          for (const auto& body : g.rules[a]) {
            if (matches(body, i, j)) {
              d(a, i, j) = 1;
              changed = true;
              break;
            }
          }
        }
      }
    }
  }
  return d(g.axiom, 0, n) != 0;
}

std::vector<Word> enumerate_source_language(const WeightedGrammar& g, std::size_t n) {
  const std::size_t sigma = g.terminal_count();
  double candidates = std::pow(static_cast<double>(sigma), static_cast<double>(n));
  if (candidates > 5e6) throw OracleError("alphabet^n is too large for brute-force enumeration");
  std::vector<Word> out;
  Word w(n, 0);
  if (sigma == 0) {
    if (n == 0 && source_derives(g, w)) out.push_back(w);
    return out;
  }
  for (;;) {
    if (source_derives(g, w)) out.push_back(w);
    bool carry = true;
    for (std::size_t pos = n; pos > 0 && carry;) {
      --pos;
      if (++w[pos] < sigma) {
        carry = false;
      } else {
        w[pos] = 0;
      }
    }
    if (carry) break;
  }
  std::sort(out.begin(), out.end(), [&](const Word& a, const Word& b) { return word_less(g.terminals, a, b); });
  return out;
}

mpq_class source_weight(const WeightedGrammar& g, const Word& word) {
  mpq_class w = 1;
  for (TerminalId t : word) w *= g.weights[t];
  return w;
}

std::vector<AmbiguityRow> check_unambiguous_up_to(const CnfGrammar& cnf, std::size_t n_max) {
  const auto ones = unit_weights(cnf);
  const CountTable counts = build_count_table(cnf, n_max, ones);
  std::vector<AmbiguityRow> rows;
  for (std::size_t n = 0; n <= n_max; ++n) {
    rows.push_back({n, counts.at(cnf.axiom, n), enumerate_language(cnf, n).words.size()});
  }
  return rows;
}

double chi_square_survival(double statistic, double degrees_of_freedom) {
  if (degrees_of_freedom <= 0) return 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

ChiSquareResult empirical_distribution_test(const std::map<std::string, std::uint64_t>& counts,
                                            const std::map<std::string, mpq_class>& exact) {
  std::uint64_t total = 0;
  for (const auto& [word, c] : counts) {
    auto it = exact.find(word);
    if (c > 0 && (it == exact.end() || it->second <= 0)) {
      throw OracleError("observed '" + word + "' which has probability zero");
    }
    total += c;
  }
  std::size_t support = 0;
  for (const auto& [word, p] : exact) support += p > 0 ? 1 : 0;
  if (support == 0 || total < 50 * support) {
    throw OracleError("insufficient samples: " + std::to_string(total) + " for " + std::to_string(support) +
                      " words (need 50 per word)");
  }
  ChiSquareResult result;
  const double n = static_cast<double>(total);
  for (const auto& [word, p] : exact) {
    if (p <= 0) continue;
    const double expected = n * p.get_d();
    auto it = counts.find(word);
    const double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    result.statistic += (observed - expected) * (observed - expected) / expected;
  }
  result.degrees_of_freedom = support - 1;
  result.p_value = chi_square_survival(result.statistic, static_cast<double>(result.degrees_of_freedom));
  return result;
}

}  // namespace nrsample
