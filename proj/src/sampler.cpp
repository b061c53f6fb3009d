#include "nrsample/sampler.hpp"

#include <set>
#include <stdexcept>

#include "nrsample/errors.hpp"
#include "nrsample/walk.hpp"

namespace nrsample {

std::uint32_t boustrophedon_split(std::size_t m, std::size_t j) {
  return static_cast<std::uint32_t>(j % 2 == 0 ? 1 + j / 2 : m - 1 - j / 2);
}

namespace {

// Candidate weights at the cursor. Every candidate word shares the factors
// outside the cursor, so its weight is (W / w[A][m]) times the candidate's
// own table factors: one division per step, one or two multiplications per
// candidate, one subtraction when the tree holds forbidden weight below it.
class CursorScan {
 public:
  CursorScan(const CnfGrammar& cnf, const CountTable& table, const SizedWord& word, const ForbiddenTree& tree,
             ForbiddenTree::Cursor at, ArithmeticCounter* ops)
      : table_(table), word_(word), tree_(tree), at_(at), ops_(ops) {
    const SizedSymbol& top = word.cursor_symbol();
    length_ = top.length;
    rule_ = &cnf.rule_of[top.symbol.id];
    if (!std::holds_alternative<TerminalRule>(*rule_)) {
      const mpz_class& own = table.at(top.symbol.id, length_);
      if (own == 0) throw InternalError("candidate scan on a word of weight zero");
      mpz_divexact(quotient_.get_mpz_t(), word.weight().get_mpz_t(), own.get_mpz_t());
      count_div(ops_);
    }
  }

  std::size_t count() const {
    if (std::holds_alternative<UnionRule>(*rule_)) return 2;
    if (std::holds_alternative<ProductRule>(*rule_)) return length_ >= 2 ? length_ - 1 : 0;
    return 1;
  }

  WalkStep step(std::size_t j) const {
    if (std::holds_alternative<UnionRule>(*rule_)) return j == 0 ? WalkStep::union_left() : WalkStep::union_right();
    if (std::holds_alternative<ProductRule>(*rule_)) return WalkStep::split(boustrophedon_split(length_, j));
    return WalkStep::emit(std::get<TerminalRule>(*rule_).terminal);
  }

  void weigh(std::size_t j, mpz_class& weight, mpz_class& adjusted) const {
    const WalkStep s = step(j);
    if (const auto* u = std::get_if<UnionRule>(rule_)) {
      const mpz_class& factor = table_.at(j == 0 ? u->left : u->right, length_);
      if (factor == 0) {
        weight = 0;
      } else {
        weight = quotient_ * factor;
        count_mul(ops_);
      }
    } else if (const auto* p = std::get_if<ProductRule>(rule_)) {
      const mpz_class& left = table_.at(p->left, s.value);
      const mpz_class& right = table_.at(p->right, length_ - s.value);
      if (left == 0 || right == 0) {
        weight = 0;
      } else {
        weight = quotient_ * left;
        weight *= right;
        count_mul(ops_, 2);
      }
    } else {
      weight = word_.weight();
    }
    const mpz_class& forbidden = tree_.contribution(at_, s);
    if (forbidden == 0) {
      adjusted = weight;
    } else {
      adjusted = weight - forbidden;
      count_add(ops_);
    }
  }

  bool forced() const { return std::holds_alternative<TerminalRule>(*rule_); }

 private:
  const CountTable& table_;
  const SizedWord& word_;
  const ForbiddenTree& tree_;
  ForbiddenTree::Cursor at_;
  ArithmeticCounter* ops_;
  const CnfRule* rule_ = nullptr;
  std::size_t length_ = 0;
  mpz_class quotient_;
};

mpz_class available(const SizedWord& word, const ForbiddenTree& tree, ForbiddenTree::Cursor at,
                    ArithmeticCounter* ops) {
  const mpz_class& forbidden = tree.weight_at(at);
  if (forbidden == 0) return word.weight();
  count_add(ops);
  return word.weight() - forbidden;
}

}  // namespace

std::vector<Candidate> step_candidates(const CnfGrammar& cnf, const CountTable& table, const SizedWord& word,
                                       const ForbiddenTree& tree, ForbiddenTree::Cursor at, ArithmeticCounter* ops) {
  if (word.mature()) throw std::invalid_argument("a mature word has no derivation candidates");
  CursorScan scan(cnf, table, word, tree, at, ops);
  std::vector<Candidate> out(scan.count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].step = scan.step(j);
    scan.weigh(j, out[j].weight, out[j].adjusted);
  }
  return out;
}

SamplerSession::SamplerSession(const CnfGrammar& cnf, const CountTable& table, std::size_t n, std::uint64_t seed,
                               SamplerOptions options)
    : cnf_(&cnf), table_(&table), n_(n), tree_(n), rng_(seed), options_(options) {
  if (n > table.max_length()) throw std::out_of_range("length exceeds the count table");
}

void SamplerSession::forbid(const Word& word) {
  if (word.size() != n_) {
    throw std::invalid_argument("forbidden word of length " + std::to_string(word.size()) + ", expected " +
                                std::to_string(n_));
  }
  tree_.insert(parse_word(*cnf_, word), word_weight(*cnf_, word), &ops_);
}

Sample draw_word(const CnfGrammar& cnf, const CountTable& table, std::size_t n, const ForbiddenTree& tree,
                 RandomSource& rng, ArithmeticCounter* ops, const SamplerOptions& options) {
  if (tree.length() != n) throw std::invalid_argument("prefix tree built for another length");
  SizedWord word = sized_word_initial(cnf, table, n);
  ForbiddenTree::Cursor at = tree.root();

  Sample sample;
  sample.walk.n = n;
  sample.remaining = available(word, tree, at, ops);
  if (sample.remaining <= 0) {
    throw ExhaustionError("every word of length " + std::to_string(n) + " is forbidden or already drawn");
  }

  // The adjusted weight of the current word is carried from step to step: it
  // is the adjusted weight of the chosen candidate. Candidates are matched
  // against r from the top of [0, budget), so the last one needs no weighing.
  mpz_class budget = sample.remaining;
  mpz_class weight, adjusted, total, rest;
  while (!word.mature()) {
    CursorScan scan(cnf, table, word, tree, at, ops);
    WalkStep chosen = scan.step(0);
    const mpz_class* known = nullptr;
    if (!scan.forced()) {
      if (budget <= 0) throw InternalError("sampler entered a fully forbidden state");
      if (options.check_conservation) {
        total = 0;
        for (std::size_t j = 0; j < scan.count(); ++j) {
          scan.weigh(j, weight, adjusted);
          total += adjusted;
        }
        if (total != budget) throw InternalError("conservation violated: candidates do not sum to the current weight");
      }
      const mpz_class r = rng.uniform_below(budget);
      if (ops) ++ops->random_draws;
      rest = budget;
      const std::size_t count = scan.count();
      for (std::size_t j = 0;; ++j) {
        if (j == count) throw InternalError("candidate scan ran past the last derivation");
        if (ops) ++ops->candidate_visits;
        if (j + 1 == count) {
          chosen = scan.step(j);
          budget = rest;
          break;
        }
        scan.weigh(j, weight, adjusted);
        if (adjusted == 0) continue;
        rest -= adjusted;
        count_add(ops);
        if (r >= rest) {
          chosen = scan.step(j);
          budget = adjusted;
          known = &weight;
          break;
        }
      }
    } else if (ops) {
      ++ops->candidate_visits;
    }
    apply_derivation_in_place(cnf, table, word, chosen, ops, known);
    at = tree.child(at, chosen);
    sample.walk.steps.push_back(chosen);
    if (ops) ++ops->derivation_steps;
    if (options.check_weights) {
      if (word.weight() != word.recompute_weight(table)) {
        throw InternalError("cached immature-word weight drifted from its recomputation");
      }
      if (budget != word.weight() - tree.weight_at(at)) {
        throw InternalError("carried adjusted weight drifted from its recomputation");
      }
    }
  }
  if (tree.is_word_end(at)) throw InternalError("sampler produced a forbidden word");
  sample.word.assign(word.prefix().begin(), word.prefix().end());
  sample.weight = word.weight();
  return sample;
}

Sample sample_one(SamplerSession& session) {
  return draw_word(session.grammar(), session.table(), session.length(), session.tree(), session.rng(),
                   &session.ops(), session.options());
}

void sample_distinct(SamplerSession& session, std::size_t k, const std::function<void(const Sample&)>& sink) {
  for (std::size_t produced = 0; produced < k; ++produced) {
    if (session.remaining_weight() <= 0) {
      throw ExhaustionError("exhausted after " + std::to_string(produced), produced);
    }
    Sample s = sample_one(session);
    session.tree().insert(s.walk, s.weight, &session.ops());
    if (sink) sink(s);
  }
}

std::vector<Sample> sample_distinct(SamplerSession& session, std::size_t k) {
  std::vector<Sample> out;
  out.reserve(k);
  sample_distinct(session, k, [&](const Sample& s) { out.push_back(s); });
  return out;
}

RejectionResult rejection_sample_distinct(const CnfGrammar& cnf, const CountTable& table, std::size_t n,
                                          std::size_t k, const std::vector<Word>& forbidden, RandomSource& rng,
                                          std::uint64_t max_trials, ArithmeticCounter* ops) {
  const ForbiddenTree empty(n);
  std::set<Word> seen(forbidden.begin(), forbidden.end());
  RejectionResult result;
  while (result.words.size() < k && result.trials < max_trials) {
    Sample s = draw_word(cnf, table, n, empty, rng, ops);
    ++result.trials;
    if (seen.insert(s.word).second) result.words.push_back(std::move(s.word));
  }
  result.complete = result.words.size() == k;
  return result;
}

mpq_class exact_word_probability(const CnfGrammar& cnf, const CountTable& table, std::size_t n,
                                 const ForbiddenTree& tree, const Word& word) {
  if (word.size() != n) throw WalkError(WalkErrorKind::NotInLanguage, "word has the wrong length");
  const ParseWalk walk = parse_word(cnf, word);
  SizedWord state = initial_word_unchecked(cnf, table, n);
  ForbiddenTree::Cursor at = tree.root();
  mpq_class probability = 1;
  for (const WalkStep& step : walk.steps) {
    const mpz_class budget = available(state, tree, at, nullptr);
    if (budget <= 0) throw std::invalid_argument("word is forbidden");
    const auto candidates = step_candidates(cnf, table, state, tree, at);
    bool found = false;
    for (const auto& c : candidates) {
      if (c.step == step) {
        mpq_class factor(c.adjusted, budget);
        factor.canonicalize();
        probability *= factor;
        found = true;
        break;
      }
    }
    if (!found) throw InternalError("walk step missing from the candidate list");
    apply_derivation_in_place(cnf, table, state, step);
    at = tree.child(at, step);
  }
  if (tree.is_word_end(at) || available(state, tree, at, nullptr) <= 0) {
    throw std::invalid_argument("word is forbidden");
  }
  probability.canonicalize();
  return probability;
}

}  // namespace nrsample
