#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "nrsample/op_counter.hpp"
#include "nrsample/walk_step.hpp"

namespace nrsample {

/// Prefix tree over the parse walks of forbidden (or already emitted) words
/// of one length. Each node stores the total weight of the words whose walk
/// passes through it, so the forbidden contribution of any immature word met
/// during sampling is a single lookup.
class ForbiddenTree {
 public:
  using NodeIndex = std::uint32_t;
  /// A position in the tree; nullopt once the sampler's walk has left every
  /// forbidden walk ("detached"), after which all contributions are zero.
  using Cursor = std::optional<NodeIndex>;

  explicit ForbiddenTree(std::size_t n = 0);

  /// Builds the tree from distinct walks. Throws DuplicateWalkError.
  static ForbiddenTree build(std::size_t n, const std::vector<std::pair<ParseWalk, mpz_class>>& walks);

  /// Two phases: top-down creation of the missing nodes along the walk,
  /// then the weight is added to every node of the path, root included.
  /// Throws DuplicateWalkError (leaving the tree unchanged) when the walk is
  /// already present, std::invalid_argument when its length differs.
  void insert(const ParseWalk& walk, const mpz_class& weight, ArithmeticCounter* ops = nullptr);

  Cursor root() const { return NodeIndex{0}; }
  Cursor child(Cursor at, const WalkStep& step) const;
  /// Weight stored at `at`, zero when detached.
  const mpz_class& weight_at(Cursor at) const;
  /// Weight of the child reached by `step`, zero when absent or detached.
  const mpz_class& contribution(Cursor at, const WalkStep& step) const { return weight_at(child(at, step)); }
  /// True when `at` ends a stored walk.
  bool is_word_end(Cursor at) const { return at && nodes_[*at].word_end; }

  const mpz_class& total() const { return nodes_[0].k_pi; }
  std::size_t length() const { return n_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t word_count() const { return words_; }
  /// Nodes visited by the most recent insert (path length including root).
  std::size_t last_insert_touched() const { return last_touched_; }

  /// Child-sum invariant at every internal node; stored walks end at leaves
  /// carrying a positive weight.
  bool check_invariants() const;

  /// Structural equality: same shape, keys, weights and word ends.
  friend bool operator==(const ForbiddenTree& a, const ForbiddenTree& b);

 private:
  struct Node {
    mpz_class k_pi = 0;
    std::vector<std::pair<std::uint64_t, NodeIndex>> children;  // sorted by key
    bool word_end = false;
  };
  std::optional<NodeIndex> find_child(NodeIndex at, std::uint64_t key) const;

  std::size_t n_;
  std::vector<Node> nodes_;
  std::size_t words_ = 0;
  std::size_t last_touched_ = 0;
};

}  // namespace nrsample
