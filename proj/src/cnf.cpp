#include "nrsample/cnf.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "nrsample/errors.hpp"

namespace nrsample {

bool CnfGrammar::single_char_terminals() const {
  return std::all_of(terminals.begin(), terminals.end(),
                     [](const std::string& t) { return t.size() == 1; });
}

bool find_terminal(const CnfGrammar& cnf, std::string_view token, TerminalId& out) {
  for (std::size_t t = 0; t < cnf.terminals.size(); ++t) {
    if (cnf.terminals[t] == token) {
      out = static_cast<TerminalId>(t);
      return true;
    }
  }
  return false;
}

namespace {

std::vector<bool> nullable_set(const WeightedGrammar& g) {
  std::vector<bool> nullable(g.non_terminal_count(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < g.non_terminal_count(); ++a) {
      if (nullable[a]) continue;
      for (const auto& body : g.rules[a]) {
        bool all = std::all_of(body.begin(), body.end(),
                               [&](const Symbol& s) { return !s.is_terminal() && nullable[s.id]; });
        if (all) {
          nullable[a] = changed = true;
          break;
        }
      }
    }
  }
  return nullable;
}

// Every way of dropping nullable occurrences, mask 0 (keep all) first.
// Empty results are discarded.
std::vector<std::vector<Body>> eliminate_epsilon(const WeightedGrammar& g,
                                                 const std::vector<bool>& nullable) {
  std::vector<std::vector<Body>> out(g.non_terminal_count());
  for (std::size_t a = 0; a < g.non_terminal_count(); ++a) {
    for (const auto& body : g.rules[a]) {
      std::vector<std::size_t> optional_positions;
      for (std::size_t p = 0; p < body.size(); ++p) {
        if (!body[p].is_terminal() && nullable[body[p].id]) optional_positions.push_back(p);
      }
      const std::size_t combos = std::size_t{1} << optional_positions.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        Body reduced;
        std::size_t next = 0;
        for (std::size_t p = 0; p < body.size(); ++p) {
          if (next < optional_positions.size() && optional_positions[next] == p) {
            bool drop = (mask >> next) & 1U;
            ++next;
            if (drop) continue;
          }
          reduced.push_back(body[p]);
        }
        if (!reduced.empty()) out[a].push_back(std::move(reduced));
      }
    }
  }
  return out;
}

std::vector<NonTerminalId> union_eval_order(const CnfGrammar& cnf) {
  enum class Mark : std::uint8_t { White, Grey, Black };
  std::vector<Mark> mark(cnf.size(), Mark::White);
  std::vector<NonTerminalId> order;
  order.reserve(cnf.size());
  std::function<void(NonTerminalId)> visit = [&](NonTerminalId a) {
    if (mark[a] == Mark::Black) return;
    if (mark[a] == Mark::Grey) {
      throw GrammarError(GrammarErrorKind::CyclicUnitRules,
                         "'" + cnf.non_terminals[a] + "' derives itself through unit rules");
    }
    mark[a] = Mark::Grey;
    if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
      visit(u->left);
      visit(u->right);
    }
    mark[a] = Mark::Black;
    order.push_back(a);
  };
  for (NonTerminalId a = 0; a < cnf.size(); ++a) visit(a);
  return order;
}

}  // namespace

CnfGrammar normalize_to_cnf(const WeightedGrammar& g) {
  const std::size_t source_count = g.non_terminal_count();
  const std::vector<bool> nullable = nullable_set(g);
  std::vector<std::vector<Body>> alts = eliminate_epsilon(g, nullable);

  // Drop alternatives that mention symbols with no non-empty word.
  std::vector<bool> productive(source_count, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < source_count; ++a) {
      if (productive[a]) continue;
      for (const auto& body : alts[a]) {
        if (std::all_of(body.begin(), body.end(),
                        [&](const Symbol& s) { return s.is_terminal() || productive[s.id]; })) {
          productive[a] = changed = true;
          break;
        }
      }
    }
  }
  for (auto& list : alts) {
    std::erase_if(list, [&](const Body& body) {
      return std::any_of(body.begin(), body.end(),
                         [&](const Symbol& s) { return !s.is_terminal() && !productive[s.id]; });
    });
  }
  if (!productive[g.axiom]) {
    throw GrammarError(GrammarErrorKind::EpsilonOnlyLanguage,
                       "'" + g.non_terminals[g.axiom] + "' derives only the empty word");
  }

  // A -> B as the only alternative makes A an alias of B.
  std::vector<std::optional<NonTerminalId>> alias(source_count);
  for (std::size_t a = 0; a < source_count; ++a) {
    if (alts[a].size() == 1 && alts[a][0].size() == 1 && !alts[a][0][0].is_terminal()) {
      alias[a] = alts[a][0][0].id;
    }
  }
  auto resolve = [&](NonTerminalId a) {
    std::size_t hops = 0;
    while (alias[a]) {
      a = *alias[a];
      if (++hops > source_count) {
        throw GrammarError(GrammarErrorKind::CyclicUnitRules,
                           "'" + g.non_terminals[a] + "' derives itself through unit rules");
      }
    }
    return a;
  };

  std::vector<bool> reachable(source_count, false);
  {
    std::vector<NonTerminalId> stack{resolve(g.axiom)};
    reachable[stack.back()] = true;
    while (!stack.empty()) {
      NonTerminalId a = stack.back();
      stack.pop_back();
      for (const auto& body : alts[a]) {
        for (const auto& s : body) {
          if (s.is_terminal()) continue;
          NonTerminalId b = resolve(s.id);
          if (!reachable[b]) {
            reachable[b] = true;
            stack.push_back(b);
          }
        }
      }
    }
  }

  CnfGrammar cnf;
  cnf.terminals = g.terminals;

  auto new_node = [&](std::string name, Origin origin) {
    cnf.non_terminals.push_back(std::move(name));
    cnf.rule_of.emplace_back(TerminalRule{0});
    cnf.origin_map.push_back(origin);
    return static_cast<NonTerminalId>(cnf.rule_of.size() - 1);
  };

  std::vector<std::optional<NonTerminalId>> cnf_id(source_count);
  for (std::size_t a = 0; a < source_count; ++a) {
    if (reachable[a] && !alias[a]) {
      cnf_id[a] = new_node(g.non_terminals[a], {Origin::Kind::SourceNonTerminal, static_cast<NonTerminalId>(a)});
    }
  }

  std::vector<std::optional<NonTerminalId>> wrapper(g.terminal_count());
  auto wrap = [&](TerminalId t) {
    if (!wrapper[t]) {
      wrapper[t] = new_node("<" + g.terminals[t] + ">", {Origin::Kind::TerminalWrapper});
      cnf.rule_of[*wrapper[t]] = TerminalRule{t};
    }
    return *wrapper[t];
  };
  auto symbol_id = [&](const Symbol& s) {
    return s.is_terminal() ? wrap(s.id) : *cnf_id[resolve(s.id)];
  };

  // Right-combed product chain for a body of length >= 2, rooted at `top`.
  auto build_product = [&](NonTerminalId top, const Body& body, NonTerminalId source, std::size_t alternative) {
    NonTerminalId node = top;
    for (std::size_t p = 0; p + 1 < body.size(); ++p) {
      NonTerminalId left = symbol_id(body[p]);
      NonTerminalId right;
      if (p + 2 == body.size()) {
        right = symbol_id(body[p + 1]);
      } else {
        std::ostringstream name;
        name << g.non_terminals[source] << '#' << alternative + 1 << '.' << p + 1;
        right = new_node(name.str(), {Origin::Kind::ProductChain, source, alternative, p + 1});
      }
      cnf.rule_of[node] = ProductRule{left, right};
      node = right;
    }
  };

  for (std::size_t a = 0; a < source_count; ++a) {
    if (!cnf_id[a]) continue;
    const NonTerminalId self = *cnf_id[a];
    const auto src = static_cast<NonTerminalId>(a);
    const auto& list = alts[a];
    if (list.size() == 1) {
      const Body& body = list[0];
      if (body.size() == 1) {
        cnf.rule_of[self] = TerminalRule{body[0].id};  // single NT bodies were aliased away
      } else {
        build_product(self, body, src, 0);
      }
      continue;
    }
    std::vector<NonTerminalId> choice(list.size());
    for (std::size_t j = 0; j < list.size(); ++j) {
      const Body& body = list[j];
      if (body.size() == 1) {
        choice[j] = symbol_id(body[0]);
      } else {
        std::ostringstream name;
        name << g.non_terminals[a] << '#' << j + 1;
        choice[j] = new_node(name.str(), {Origin::Kind::ProductChain, src, j, 0});
        build_product(choice[j], body, src, j);
      }
    }
    NonTerminalId node = self;
    for (std::size_t j = 0; j + 1 < list.size(); ++j) {
      NonTerminalId right;
      if (j + 2 == list.size()) {
        right = choice[j + 1];
      } else {
        std::ostringstream name;
        name << g.non_terminals[a] << "#u" << j + 1;
        right = new_node(name.str(), {Origin::Kind::UnionChain, src, j + 1});
      }
      cnf.rule_of[node] = UnionRule{choice[j], right};
      node = right;
    }
  }

  cnf.axiom = *cnf_id[resolve(g.axiom)];
  cnf.axiom_derives_epsilon = nullable[g.axiom];
  if (cnf.axiom_derives_epsilon) {
    bool in_body = std::any_of(cnf.rule_of.begin(), cnf.rule_of.end(), [&](const CnfRule& r) {
      if (const auto* u = std::get_if<UnionRule>(&r)) return u->left == cnf.axiom || u->right == cnf.axiom;
      if (const auto* p = std::get_if<ProductRule>(&r)) return p->left == cnf.axiom || p->right == cnf.axiom;
      return false;
    });
    if (in_body) {
      std::string name = cnf.non_terminals[cnf.axiom] + "'";
      while (std::find(cnf.non_terminals.begin(), cnf.non_terminals.end(), name) != cnf.non_terminals.end()) {
        name += "'";
      }
      CnfRule copy = cnf.rule_of[cnf.axiom];
      NonTerminalId fresh = new_node(name, {Origin::Kind::FreshAxiom, g.axiom});
      cnf.rule_of[fresh] = copy;
      cnf.axiom = fresh;
    }
  }

  mpz_class scale = 1;
  for (const auto& w : g.weights) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), w.get_den_mpz_t());
  cnf.weight_scale = scale;
  cnf.int_weights.reserve(g.weights.size());
  for (const auto& w : g.weights) {
    cnf.int_weights.push_back(w.get_num() * (scale / w.get_den()));
  }

  cnf.eval_order = union_eval_order(cnf);
  return cnf;
}

std::vector<std::string> validate_cnf(const CnfGrammar& cnf) {
  std::vector<std::string> problems;
  const std::size_t count = cnf.size();
  auto complain = [&](const std::string& what) { problems.push_back(what); };
  if (cnf.non_terminals.size() != count) complain("non_terminals and rule_of differ in size");
  if (cnf.origin_map.size() != count) complain("origin_map does not cover every non-terminal");
  if (cnf.axiom >= count) complain("axiom out of range");
  if (cnf.int_weights.size() != cnf.terminals.size()) complain("int_weights and terminals differ in size");
  for (std::size_t t = 0; t < cnf.int_weights.size(); ++t) {
    if (cnf.int_weights[t] < 1) complain("terminal '" + cnf.terminals[t] + "' has weight < 1");
  }
  for (std::size_t a = 0; a < count; ++a) {
    const std::string who = "'" + (a < cnf.non_terminals.size() ? cnf.non_terminals[a] : std::to_string(a)) + "'";
    std::visit(
        [&](const auto& rule) {
          using R = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<R, TerminalRule>) {
            if (rule.terminal >= cnf.terminals.size()) complain(who + " emits an unknown terminal");
          } else {
            if (rule.left >= count || rule.right >= count) {
              complain(who + " references an unknown non-terminal");
            } else if (cnf.axiom_derives_epsilon && (rule.left == cnf.axiom || rule.right == cnf.axiom)) {
              complain(who + " uses the epsilon-deriving axiom in its body");
            }
          }
        },
        cnf.rule_of[a]);
  }
  if (cnf.eval_order.size() != count) {
    complain("eval_order is not a permutation");
  } else {
    std::vector<std::size_t> rank(count, count);
    for (std::size_t i = 0; i < count; ++i) {
      if (cnf.eval_order[i] >= count || rank[cnf.eval_order[i]] != count) {
        complain("eval_order is not a permutation");
        return problems;
      }
      rank[cnf.eval_order[i]] = i;
    }
    for (std::size_t a = 0; a < count; ++a) {
      if (const auto* u = std::get_if<UnionRule>(&cnf.rule_of[a])) {
        if (u->left < count && u->right < count && (rank[u->left] > rank[a] || rank[u->right] > rank[a])) {
          complain("eval_order places '" + cnf.non_terminals[a] + "' before a union child");
        }
      }
    }
  }
  return problems;
}

std::string to_text(const CnfGrammar& cnf) {
  std::ostringstream os;
  for (std::size_t a = 0; a < cnf.size(); ++a) {
    os << cnf.non_terminals[a] << " -> ";
    std::visit(
        [&](const auto& rule) {
          using R = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<R, UnionRule>) {
            os << cnf.non_terminals[rule.left] << " | " << cnf.non_terminals[rule.right];
          } else if constexpr (std::is_same_v<R, ProductRule>) {
            os << cnf.non_terminals[rule.left] << ' ' << cnf.non_terminals[rule.right];
          } else {
            os << cnf.terminals[rule.terminal];
          }
        },
        cnf.rule_of[a]);
    if (a == cnf.axiom && cnf.axiom_derives_epsilon) os << " | _";
    os << " ;\n";
  }
  for (std::size_t t = 0; t < cnf.terminals.size(); ++t) {
    if (cnf.int_weights[t] != 1) os << "weight " << cnf.terminals[t] << ' ' << cnf.int_weights[t].get_str() << '\n';
  }
  return os.str();
}

}  // namespace nrsample
