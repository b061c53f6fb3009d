#include "nrsample/prefix_tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "nrsample/errors.hpp"

namespace nrsample {

namespace {
const mpz_class kZero = 0;
}

ForbiddenTree::ForbiddenTree(std::size_t n) : n_(n), nodes_(1) {}

ForbiddenTree ForbiddenTree::build(std::size_t n, const std::vector<std::pair<ParseWalk, mpz_class>>& walks) {
  ForbiddenTree tree(n);
  for (const auto& [walk, weight] : walks) tree.insert(walk, weight);
  return tree;
}

std::optional<ForbiddenTree::NodeIndex> ForbiddenTree::find_child(NodeIndex at, std::uint64_t key) const {
  const auto& kids = nodes_[at].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), key,
                             [](const auto& entry, std::uint64_t k) { return entry.first < k; });
  if (it == kids.end() || it->first != key) return std::nullopt;
  return it->second;
}

ForbiddenTree::Cursor ForbiddenTree::child(Cursor at, const WalkStep& step) const {
  if (!at) return std::nullopt;
  return find_child(*at, step.key());
}

const mpz_class& ForbiddenTree::weight_at(Cursor at) const { return at ? nodes_[*at].k_pi : kZero; }

void ForbiddenTree::insert(const ParseWalk& walk, const mpz_class& weight, ArithmeticCounter* ops) {
  if (walk.n != n_) {
    throw std::invalid_argument("walk of length " + std::to_string(walk.n) + " inserted into a tree for length " +
                                std::to_string(n_));
  }
  // Phase (a): follow the walk, then create whatever is missing.
  std::vector<NodeIndex> path;
  path.reserve(walk.steps.size() + 1);
  path.push_back(0);
  std::size_t k = 0;
  for (; k < walk.steps.size(); ++k) {
    auto next = find_child(path.back(), walk.steps[k].key());
    if (!next) break;
    path.push_back(*next);
  }
  if (k == walk.steps.size() && nodes_[path.back()].word_end) {
    throw DuplicateWalkError("walk already present in the prefix tree");
  }
  for (; k < walk.steps.size(); ++k) {
    const auto fresh = static_cast<NodeIndex>(nodes_.size());
    nodes_.emplace_back();
    auto& kids = nodes_[path.back()].children;
    const std::uint64_t key = walk.steps[k].key();
    kids.insert(std::lower_bound(kids.begin(), kids.end(), key,
                                 [](const auto& entry, std::uint64_t x) { return entry.first < x; }),
                {key, fresh});
    path.push_back(fresh);
  }
  nodes_[path.back()].word_end = true;

  // Phase (b): propagate the word's weight to every ancestor.
  for (NodeIndex node : path) nodes_[node].k_pi += weight;
  count_add(ops, path.size());
  if (ops) ops->tree_nodes_touched += path.size();
  last_touched_ = path.size();
  ++words_;
}

bool ForbiddenTree::check_invariants() const {
  for (const auto& node : nodes_) {
    if (node.word_end) {
      if (!node.children.empty() || node.k_pi <= 0) return false;
      continue;
    }
    if (node.children.empty()) {
      if (&node != &nodes_[0] || node.k_pi != 0) return false;  // only an empty tree has a bare root
      continue;
    }
    mpz_class sum = 0;
    for (const auto& [key, index] : node.children) sum += nodes_[index].k_pi;
    if (sum != node.k_pi) return false;
  }
  return true;
}

bool operator==(const ForbiddenTree& a, const ForbiddenTree& b) {
  if (a.n_ != b.n_ || a.nodes_.size() != b.nodes_.size()) return false;
  std::vector<std::pair<ForbiddenTree::NodeIndex, ForbiddenTree::NodeIndex>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const auto& nx = a.nodes_[x];
    const auto& ny = b.nodes_[y];
    if (nx.k_pi != ny.k_pi || nx.word_end != ny.word_end || nx.children.size() != ny.children.size()) return false;
    for (std::size_t c = 0; c < nx.children.size(); ++c) {
      if (nx.children[c].first != ny.children[c].first) return false;
      stack.emplace_back(nx.children[c].second, ny.children[c].second);
    }
  }
  return true;
}

}  // namespace nrsample
