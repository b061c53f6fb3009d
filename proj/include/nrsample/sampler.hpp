#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "nrsample/cnf.hpp"
#include "nrsample/counting.hpp"
#include "nrsample/op_counter.hpp"
#include "nrsample/prefix_tree.hpp"
#include "nrsample/random_source.hpp"
#include "nrsample/walk_step.hpp"

namespace nrsample {

struct SamplerOptions {
  /// Verify, at every random choice, that the adjusted candidate weights sum
  /// to the adjusted weight of the current word. O(m) per product step.
  bool check_conservation = false;
  /// Recompute each cached immature-word weight from scratch and compare.
  bool check_weights = false;
};

/// A legal derivation of the cursor with the weight of the word it leads to
/// and that weight minus the forbidden contribution below it.
struct Candidate {
  WalkStep step;
  mpz_class weight;
  mpz_class adjusted;
};

/// j-th product split visited for a non-terminal of length m:
/// 1, m-1, 2, m-2, ...
std::uint32_t boustrophedon_split(std::size_t m, std::size_t j);

/// Every legal derivation of the cursor of `word`, in the order the sampler
/// visits them (left then right for unions, boustrophedon for products).
/// Requires an immature word with non-zero weight.
std::vector<Candidate> step_candidates(const CnfGrammar& cnf, const CountTable& table, const SizedWord& word,
                                       const ForbiddenTree& tree, ForbiddenTree::Cursor at,
                                       ArithmeticCounter* ops = nullptr);

/// One drawn word with the weights needed to state its probability:
/// probability = weight / remaining.
struct Sample {
  Word word;
  ParseWalk walk;
  mpz_class weight;
  mpz_class remaining;  // total weight minus forbidden weight at draw time
};

/// State of a non-redundant generation run at a fixed length. The grammar
/// and table are borrowed and may be shared between sessions; the tree, the
/// generator and the counters belong to the session.
class SamplerSession {
 public:
  SamplerSession(const CnfGrammar& cnf, const CountTable& table, std::size_t n, std::uint64_t seed,
                 SamplerOptions options = {});

  const CnfGrammar& grammar() const { return *cnf_; }
  const CountTable& table() const { return *table_; }
  std::size_t length() const { return n_; }
  ForbiddenTree& tree() { return tree_; }
  const ForbiddenTree& tree() const { return tree_; }
  RandomSource& rng() { return rng_; }
  ArithmeticCounter& ops() { return ops_; }
  const SamplerOptions& options() const { return options_; }

  const mpz_class& total_weight() const { return table_->at(cnf_->axiom, n_); }
  mpz_class remaining_weight() const { return total_weight() - tree_.total(); }

  /// Parses `word` and adds it to the forbidden tree. Throws WalkError for
  /// foreign words, DuplicateWalkError for repeats, std::invalid_argument
  /// for words of another length.
  void forbid(const Word& word);

 private:
  const CnfGrammar* cnf_;
  const CountTable* table_;
  std::size_t n_;
  ForbiddenTree tree_;
  RandomSource rng_;
  ArithmeticCounter ops_;
  SamplerOptions options_;
};

/// Draws one word of length n outside the tree, with probability
/// weight(w) / (total - tree.total()). The tree is not modified. Throws
/// ExhaustionError when nothing remains and InternalError if a forbidden
/// word is reached.
Sample draw_word(const CnfGrammar& cnf, const CountTable& table, std::size_t n, const ForbiddenTree& tree,
                 RandomSource& rng, ArithmeticCounter* ops = nullptr, const SamplerOptions& options = {});

/// draw_word over the session's tree, generator and counters.
Sample sample_one(SamplerSession& session);

/// Draws k distinct words, inserting each into the tree before the next
/// draw. `sink` sees every word as soon as it is committed. Throws
/// ExhaustionError(produced) when the language runs out first.
void sample_distinct(SamplerSession& session, std::size_t k, const std::function<void(const Sample&)>& sink);
std::vector<Sample> sample_distinct(SamplerSession& session, std::size_t k);

inline std::uint64_t default_max_trials(std::size_t k) { return 1000 * static_cast<std::uint64_t>(k); }

struct RejectionResult {
  std::vector<Word> words;
  std::uint64_t trials = 0;
  bool complete = false;  // false when max_trials ran out first
};

/// Unconstrained draws (empty tree, nothing inserted), keeping each word not
/// already in `forbidden` or emitted. Stops after k words or max_trials draws.
/// Throws ExhaustionError if the language is empty at length n.
RejectionResult rejection_sample_distinct(const CnfGrammar& cnf, const CountTable& table, std::size_t n,
                                          std::size_t k, const std::vector<Word>& forbidden, RandomSource& rng,
                                          std::uint64_t max_trials, ArithmeticCounter* ops = nullptr);

/// Exact probability that draw_word returns `word` given `tree`, computed as
/// the product of the per-step choice probabilities along its walk. Throws
/// WalkError for foreign words and std::invalid_argument for forbidden ones.
mpq_class exact_word_probability(const CnfGrammar& cnf, const CountTable& table, std::size_t n,
                                 const ForbiddenTree& tree, const Word& word);

}  // namespace nrsample
