#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "branchmap/assignment.hpp"
#include "branchmap/decomposition.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/metric.hpp"

namespace branchmap {

/// Rooted unordered tree whose nodes carry branch labels. No ordering or
/// monotonicity is required; an empty tree has no nodes.
class LabeledTree {
 public:
  LabeledTree() = default;

  LabeledTree(std::vector<BranchLabel> labels, std::vector<int> parents)
      : labels_(std::move(labels)), parents_(std::move(parents)) {
    if (labels_.size() != parents_.size()) {
      throw PreconditionError("labeled tree: label and parent arrays differ in length");
    }
    children_.resize(labels_.size());
    for (std::size_t v = 0; v < parents_.size(); ++v) {
      const int p = parents_[v];
      if (p < 0) {
        if (root_ >= 0) throw PreconditionError("labeled tree: more than one root");
        root_ = static_cast<int>(v);
      } else if (p >= static_cast<int>(parents_.size())) {
        throw PreconditionError("labeled tree: parent out of range");
      } else {
        children_[p].push_back(static_cast<int>(v));
      }
    }
    if (!labels_.empty() && root_ < 0) throw PreconditionError("labeled tree: no root");
    // Postorder; also detects cycles and disconnected parts.
    if (!labels_.empty()) {
      std::vector<std::pair<int, std::size_t>> stack{{root_, 0}};
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < children_[v].size()) {
          stack.emplace_back(children_[v][next++], 0);
        } else {
          postorder_.push_back(v);
          stack.pop_back();
        }
        if (postorder_.size() > labels_.size()) break;
      }
      if (postorder_.size() != labels_.size()) throw PreconditionError("labeled tree: not a single rooted tree");
    }
  }

  bool empty() const noexcept { return labels_.empty(); }
  std::size_t size() const noexcept { return labels_.size(); }
  int root() const noexcept { return root_; }
  const BranchLabel& label(int v) const { return labels_[v]; }
  int parent(int v) const { return parents_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  const std::vector<int>& postorder() const noexcept { return postorder_; }

 private:
  std::vector<BranchLabel> labels_;
  std::vector<int> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> postorder_;
  int root_ = -1;
};

enum class LabeledTarget {
  kMergeTree,  // the merge tree itself, nodes labeled by persistence pairs
  kBdt,        // the branch decomposition tree
};

/// Labels a tree with its elder-rule branches.
///
/// For kBdt the result is the decomposition tree, one node per branch. For
/// kMergeTree every node keeps its place: a leaf carries its branch, an inner
/// node the branch that starts there (the most persistent one when several
/// do, ties to the smaller leaf id) and the root the main branch.
inline LabeledTree elder_labeled_inputs(const MergeTree& tree, LabeledTarget target) {
  require_valid(tree);
  if (tree.empty()) return {};
  const auto B = elder_rule_decomposition(tree);
  auto label_of = [&](const Branch& b) { return BranchLabel{tree.value(b.start), tree.value(b.leaf)}; };
  if (target == LabeledTarget::kBdt) {
    const auto bdt = build_bdt(tree, B);
    std::vector<BranchLabel> labels;
    for (const Branch& b : bdt.vertices) labels.push_back(label_of(b));
    return LabeledTree(std::move(labels), bdt.parent);
  }
  std::vector<BranchLabel> labels(tree.size());
  std::vector<int> chosen(tree.size(), -1);
  for (std::size_t i = 0; i < B.size(); ++i) {
    const Branch& b = B.branches[i];
    labels[b.leaf] = label_of(b);
    const int cur = chosen[b.start];
    const bool better =
        cur < 0 || label_of(b).persistence() > label_of(B.branches[cur]).persistence() ||
        (label_of(b).persistence() == label_of(B.branches[cur]).persistence() && b.leaf < B.branches[cur].leaf);
    if (better) {
      chosen[b.start] = static_cast<int>(i);
      labels[b.start] = label_of(b);
    }
  }
  return LabeledTree(std::move(labels), std::vector<int>(tree.parents().begin(), tree.parents().end()));
}

namespace detail {

struct LabeledCosts {
  const LabeledTree& t1;
  const LabeledTree& t2;
  BaseMetric metric;
  Aggregation mode;

  double relabel(int i, int j) const { return contribution(metric.match(t1.label(i), t2.label(j)), mode); }
  double del1(int i) const { return contribution(metric.deletion(t1.label(i)), mode); }
  double del2(int j) const { return contribution(metric.deletion(t2.label(j)), mode); }
};

// Whole-subtree deletion totals.
inline std::vector<double> subtree_deletion(const LabeledTree& t, const BaseMetric& metric, Aggregation mode) {
  std::vector<double> s(t.size(), 0.0);
  for (int v : t.postorder()) {
    s[v] = contribution(metric.deletion(t.label(v)), mode);
    for (int c : t.children(v)) s[v] += s[c];
  }
  return s;
}

}  // namespace detail

/// Constrained edit distance between unordered labeled trees: disjoint
/// subtrees map to disjoint subtrees. Deleting a node reattaches its
/// children to its parent.
inline double constrained_edit_distance(const LabeledTree& t1, const LabeledTree& t2, const BaseMetric& metric,
                                        Aggregation mode) {
  const auto s1 = detail::subtree_deletion(t1, metric, mode);
  const auto s2 = detail::subtree_deletion(t2, metric, mode);
  if (t1.empty() || t2.empty()) {
    return finish(t1.empty() ? (t2.empty() ? 0.0 : s2[t2.root()]) : s1[t1.root()], mode);
  }
  const detail::LabeledCosts cost{t1, t2, metric, mode};
  const std::size_t n1 = t1.size(), n2 = t2.size();
  std::vector<double> tree_d(n1 * n2), forest_d(n1 * n2);
  auto T = [&](int i, int j) -> double& { return tree_d[i * n2 + j]; };
  auto F = [&](int i, int j) -> double& { return forest_d[i * n2 + j]; };
  // forest (children of i) deleted entirely
  auto fdel1 = [&](int i) { return s1[i] - cost.del1(i); };
  auto fdel2 = [&](int j) { return s2[j] - cost.del2(j); };

  for (int i : t1.postorder()) {
    const auto& ki = t1.children(i);
    for (int j : t2.postorder()) {
      const auto& kj = t2.children(j);
      // forest distance
      double f = solve_gap_assignment(
                     static_cast<int>(ki.size()), static_cast<int>(kj.size()),
                     [&](int a, int b) { return T(ki[a], kj[b]); }, [&](int a) { return s1[ki[a]]; },
                     [&](int b) { return s2[kj[b]]; })
                     .cost;
      for (int jt : kj) f = std::min(f, fdel2(j) + F(i, jt) - fdel2(jt));
      for (int is : ki) f = std::min(f, fdel1(i) + F(is, j) - fdel1(is));
      F(i, j) = f;
      // tree distance
      double t = f + cost.relabel(i, j);
      for (int jt : kj) t = std::min(t, s2[j] + T(i, jt) - s2[jt]);
      for (int is : ki) t = std::min(t, s1[i] + T(is, j) - s1[is]);
      T(i, j) = t;
    }
  }
  return finish(T(t1.root(), t2.root()), mode);
}

/// One-degree edit distance: roots are always matched and deleting a node
/// deletes its whole subtree. Children are matched without order.
inline double one_degree_distance(const LabeledTree& t1, const LabeledTree& t2, const BaseMetric& metric,
                                  Aggregation mode) {
  const auto s1 = detail::subtree_deletion(t1, metric, mode);
  const auto s2 = detail::subtree_deletion(t2, metric, mode);
  if (t1.empty() || t2.empty()) {
    return finish(t1.empty() ? (t2.empty() ? 0.0 : s2[t2.root()]) : s1[t1.root()], mode);
  }
  const detail::LabeledCosts cost{t1, t2, metric, mode};
  const std::size_t n2 = t2.size();
  std::vector<double> d(t1.size() * n2);
  for (int i : t1.postorder()) {
    const auto& ki = t1.children(i);
    for (int j : t2.postorder()) {
      const auto& kj = t2.children(j);
      d[i * n2 + j] = cost.relabel(i, j) +
                      solve_gap_assignment(
                          static_cast<int>(ki.size()), static_cast<int>(kj.size()),
                          [&](int a, int b) { return d[ki[a] * n2 + kj[b]]; }, [&](int a) { return s1[ki[a]]; },
                          [&](int b) { return s2[kj[b]]; })
                          .cost;
    }
  }
  return finish(d[t1.root() * n2 + t2.root()], mode);
}

}  // namespace branchmap
