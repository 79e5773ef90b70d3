#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"

namespace branchmap {

/// A root-to-leaf directed path, stored by its endpoints. The interior is
/// implied because paths in a tree are unique.
struct Branch {
  NodeId start = kNoNode;
  NodeId leaf = kNoNode;

  friend auto operator<=>(const Branch&, const Branch&) = default;
};

/// Nodes of the branch from start to leaf inclusive.
inline std::vector<NodeId> vertex_sequence(const MergeTree& tree, const Branch& b) {
  std::vector<NodeId> path;
  for (NodeId v = b.leaf; v != kNoNode; v = tree.parent(v)) {
    path.push_back(v);
    if (v == b.start) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Set of branches whose edge sets partition the tree's edges. The main
/// branch (the one starting at the root) is at index `main`.
struct BranchDecomposition {
  std::vector<Branch> branches;
  std::size_t main = 0;

  bool empty() const noexcept { return branches.empty(); }
  std::size_t size() const noexcept { return branches.size(); }
  const Branch& main_branch() const { return branches.at(main); }

  /// Branches in canonical order (main first, rest sorted) for set comparisons.
  std::vector<Branch> sorted() const {
    if (branches.empty()) return {};
    std::vector<Branch> rest;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      if (i != main) rest.push_back(branches[i]);
    }
    std::sort(rest.begin(), rest.end());
    rest.insert(rest.begin(), branches[main]);
    return rest;
  }

  friend bool operator==(const BranchDecomposition& a, const BranchDecomposition& b) {
    return a.sorted() == b.sorted();
  }
};

/// Lists every reason B fails to be a branch decomposition of tree; empty
/// when B is valid.
inline std::vector<std::string> check_decomposition(const MergeTree& tree,
                                                    const BranchDecomposition& B) {
  std::vector<std::string> problems;
  if (tree.empty()) {
    if (!B.empty()) problems.push_back("empty tree must have an empty decomposition");
    return problems;
  }
  if (B.empty()) {
    problems.push_back("decomposition has no branches");
    return problems;
  }
  if (B.main >= B.size()) problems.push_back("main index out of range");

  const auto n = static_cast<NodeId>(tree.size());
  std::vector<int> edge_uses(tree.size(), 0);  // edge identified by its child node
  std::size_t root_branches = 0;
  for (std::size_t i = 0; i < B.size(); ++i) {
    const Branch& b = B.branches[i];
    const std::string name =
        "branch (" + std::to_string(b.start) + "," + std::to_string(b.leaf) + ")";
    if (b.start < 0 || b.start >= n || b.leaf < 0 || b.leaf >= n) {
      problems.push_back(name + " references unknown nodes");
      continue;
    }
    if (!tree.is_leaf(b.leaf) || b.leaf == tree.root()) {
      problems.push_back(name + " does not end in a leaf");
      continue;
    }
    if (!tree.is_strict_ancestor(b.start, b.leaf)) {
      problems.push_back(name + " is not a root-to-leaf directed path");
      continue;
    }
    if (b.start == tree.root()) {
      ++root_branches;
      if (i != B.main) problems.push_back(name + " contains the root but is not marked main");
    }
    for (NodeId v = b.leaf; v != b.start; v = tree.parent(v)) ++edge_uses[v];
  }
  if (root_branches != 1) problems.push_back("exactly one branch must contain the root");
  for (NodeId v = 0; v < n; ++v) {
    if (v == tree.root()) continue;
    if (edge_uses[v] == 0) {
      problems.push_back("edge above node " + std::to_string(v) + " is not covered");
    } else if (edge_uses[v] > 1) {
      problems.push_back("edge above node " + std::to_string(v) + " is covered twice");
    }
  }
  return problems;
}

inline bool is_decomposition(const MergeTree& tree, const BranchDecomposition& B) {
  return check_decomposition(tree, B).empty();
}

/// For every node with children, the child on the branch that enters the
/// node from above; kNoNode for leaves. The root's entry is its only child.
inline std::vector<NodeId> continuation_children(const MergeTree& tree,
                                                 const BranchDecomposition& B) {
  std::vector<NodeId> next(tree.size(), kNoNode);
  for (const Branch& b : B.branches) {
    for (NodeId v = b.leaf; v != b.start; v = tree.parent(v)) {
      const NodeId p = tree.parent(v);
      if (p != b.start) next[p] = v;
    }
  }
  if (!tree.empty()) next[tree.root()] = root_child(tree);
  return next;
}

/// Index of the branch that owns the edge above each node (kNoNode-like -1
/// for the root).
inline std::vector<int> edge_owner(const MergeTree& tree, const BranchDecomposition& B) {
  std::vector<int> owner(tree.size(), -1);
  for (std::size_t i = 0; i < B.size(); ++i) {
    const Branch& b = B.branches[i];
    for (NodeId v = b.leaf; v != b.start; v = tree.parent(v)) owner[v] = static_cast<int>(i);
  }
  return owner;
}

/// Builds the decomposition in which every inner node continues its
/// incoming branch into next[v]. Main branch first, the rest sorted.
inline BranchDecomposition decomposition_from_continuation(const MergeTree& tree,
                                                           const std::vector<NodeId>& next) {
  BranchDecomposition B;
  if (tree.empty()) return B;
  auto follow = [&](NodeId v) {
    while (!tree.is_leaf(v)) v = next[v];
    return v;
  };
  B.branches.push_back({tree.root(), follow(root_child(tree))});
  std::vector<Branch> rest;
  for (NodeId v : tree.postorder()) {
    if (v == tree.root()) continue;
    for (NodeId c : tree.children(v)) {
      if (c != next[v]) rest.push_back({v, follow(c)});
    }
  }
  std::sort(rest.begin(), rest.end());
  B.branches.insert(B.branches.end(), rest.begin(), rest.end());
  return B;
}

/// Every branch decomposition of a small tree. The count is the product of
/// child counts over the non-root inner nodes.
inline std::vector<BranchDecomposition> enumerate_branch_decompositions(
    const MergeTree& tree, std::size_t max_leaves = 10) {
  require_valid(tree);
  if (tree.empty()) return {BranchDecomposition{}};
  if (tree.leaves().size() > max_leaves) {
    throw SizeLimitError("enumerate_branch_decompositions: " +
                         std::to_string(tree.leaves().size()) + " leaves exceeds cap of " +
                         std::to_string(max_leaves));
  }
  std::vector<NodeId> inner;
  for (NodeId v : tree.postorder()) {
    if (v != tree.root() && !tree.is_leaf(v)) inner.push_back(v);
  }
  std::vector<NodeId> next(tree.size(), kNoNode);
  next[tree.root()] = root_child(tree);
  std::vector<std::size_t> choice(inner.size(), 0);
  std::vector<BranchDecomposition> out;
  while (true) {
    for (std::size_t k = 0; k < inner.size(); ++k) next[inner[k]] = tree.children(inner[k])[choice[k]];
    out.push_back(decomposition_from_continuation(tree, next));
    std::size_t k = 0;
    while (k < inner.size() && ++choice[k] == tree.children(inner[k]).size()) choice[k++] = 0;
    if (k == inner.size()) break;
  }
  return out;
}

/// Leaf with the largest value below each node; ties go to the smaller id.
inline std::vector<NodeId> highest_leaf_below(const MergeTree& tree) {
  std::vector<NodeId> best(tree.size(), kNoNode);
  for (NodeId v : tree.postorder()) {
    if (tree.is_leaf(v)) {
      best[v] = v;
      continue;
    }
    for (NodeId c : tree.children(v)) {
      const NodeId cand = best[c];
      if (best[v] == kNoNode || tree.value(cand) > tree.value(best[v]) ||
          (tree.value(cand) == tree.value(best[v]) && cand < best[v])) {
        best[v] = cand;
      }
    }
  }
  return best;
}

/// Elder rule: at each inner node the branch continues toward the highest
/// leaf; equal leaf values are broken by the smaller leaf id.
inline BranchDecomposition elder_rule_decomposition(const MergeTree& tree) {
  require_valid(tree);
  if (tree.empty()) return {};
  const auto best = highest_leaf_below(tree);
  std::vector<NodeId> next(tree.size(), kNoNode);
  for (NodeId v : tree.postorder()) {
    for (NodeId c : tree.children(v)) {
      if (best[c] == best[v]) next[v] = c;
    }
  }
  return decomposition_from_continuation(tree, next);
}

/// The two trees obtained by cutting the subtree rooted in edge (child, parent).
/// `*_origin[k]` is the id node k had in the input tree.
struct TreeSplit {
  MergeTree inner;
  std::vector<NodeId> inner_origin;
  MergeTree outer;
  std::vector<NodeId> outer_origin;
};

inline TreeSplit split_at_edge(const MergeTree& tree, NodeId child, NodeId parent) {
  require_valid(tree);
  if (child < 0 || child >= static_cast<NodeId>(tree.size()) || tree.parent(child) != parent) {
    throw PreconditionError("split_at_edge: (" + std::to_string(child) + "," +
                            std::to_string(parent) + ") is not a tree edge");
  }
  const auto n = tree.size();
  // Reverse postorder visits parents first: a node is inside when its parent is.
  std::vector<char> in_sub(n, 0);
  const auto& post = tree.postorder();
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    const NodeId v = *it;
    if (v == child || (tree.parent(v) != kNoNode && in_sub[tree.parent(v)])) in_sub[v] = 1;
  }

  auto build = [&](const std::vector<NodeId>& keep, const std::vector<NodeId>& new_parent_orig,
                   std::vector<NodeId>& origin) {
    std::vector<NodeId> index(n, kNoNode);
    origin = keep;
    for (std::size_t k = 0; k < keep.size(); ++k) index[keep[k]] = static_cast<NodeId>(k);
    std::vector<double> values;
    std::vector<NodeId> parents;
    for (NodeId v : keep) {
      values.push_back(tree.value(v));
      const NodeId p = new_parent_orig[v];
      parents.push_back(p == kNoNode ? kNoNode : index[p]);
    }
    return MergeTree(std::move(values), std::move(parents));
  };

  TreeSplit out;
  std::vector<NodeId> up(n, kNoNode);
  std::vector<NodeId> keep_inner;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    if (in_sub[v] || v == parent) keep_inner.push_back(v);
    if (in_sub[v]) up[v] = tree.parent(v);
  }
  up[parent] = kNoNode;
  out.inner = build(keep_inner, up, out.inner_origin);

  if (parent == tree.root()) return out;  // nothing but the root would remain

  std::fill(up.begin(), up.end(), kNoNode);
  const bool splice = tree.children(parent).size() == 2;
  NodeId sibling = kNoNode;
  if (splice) {
    for (NodeId c : tree.children(parent)) {
      if (c != child) sibling = c;
    }
  }
  std::vector<NodeId> keep_outer;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    if (in_sub[v] || (splice && v == parent)) continue;
    keep_outer.push_back(v);
    up[v] = tree.parent(v);
  }
  if (splice) up[sibling] = tree.parent(parent);
  out.outer = build(keep_outer, up, out.outer_origin);
  return out;
}

struct InducedDecompositions {
  TreeSplit split;
  BranchDecomposition inner;  // decomposition of the cut-off subtree
  BranchDecomposition outer;  // decomposition of what remains
};

/// Splits B along the subtree rooted in edge (child, parent). Some branch of
/// B must start in that edge. Branches are re-expressed in the node ids of
/// the two resulting trees.
inline InducedDecompositions induced_decomposition(const MergeTree& tree,
                                                   const BranchDecomposition& B, NodeId child,
                                                   NodeId parent) {
  if (!is_decomposition(tree, B)) {
    throw PreconditionError("induced_decomposition: input is not a decomposition of the tree");
  }
  const auto starts_in_edge = [&](const Branch& b) {
    return b.start == parent && tree.is_ancestor_or_self(child, b.leaf);
  };
  if (std::none_of(B.branches.begin(), B.branches.end(), starts_in_edge)) {
    throw PreconditionError("induced_decomposition: no branch starts in edge (" +
                            std::to_string(child) + "," + std::to_string(parent) + ")");
  }

  InducedDecompositions out;
  out.split = split_at_edge(tree, child, parent);
  auto remap = [](const std::vector<NodeId>& origin) {
    std::vector<NodeId> to_new;
    for (std::size_t k = 0; k < origin.size(); ++k) {
      if (static_cast<std::size_t>(origin[k]) >= to_new.size()) to_new.resize(origin[k] + 1, kNoNode);
      to_new[origin[k]] = static_cast<NodeId>(k);
    }
    return to_new;
  };
  const auto inner_id = remap(out.split.inner_origin);
  const auto outer_id = remap(out.split.outer_origin);

  std::vector<Branch> inner_rest;
  std::vector<Branch> outer_rest;
  for (const Branch& b : B.branches) {
    if (starts_in_edge(b)) {
      out.inner.branches.insert(out.inner.branches.begin(), {inner_id[b.start], inner_id[b.leaf]});
    } else if (b.start != parent && tree.is_ancestor_or_self(child, b.start)) {
      inner_rest.push_back({inner_id[b.start], inner_id[b.leaf]});
    } else if (!out.split.outer.empty()) {
      const Branch nb{outer_id[b.start], outer_id[b.leaf]};
      if (b.start == tree.root()) {
        out.outer.branches.insert(out.outer.branches.begin(), nb);
      } else {
        outer_rest.push_back(nb);
      }
    }
  }
  std::sort(inner_rest.begin(), inner_rest.end());
  std::sort(outer_rest.begin(), outer_rest.end());
  out.inner.branches.insert(out.inner.branches.end(), inner_rest.begin(), inner_rest.end());
  out.outer.branches.insert(out.outer.branches.end(), outer_rest.begin(), outer_rest.end());
  return out;
}

/// Tree over the branches of a decomposition under the parent-branch relation.
struct BranchDecompTree {
  std::vector<Branch> vertices;            // same order as the decomposition
  std::vector<int> parent;                 // -1 for the main branch
  std::vector<std::vector<int>> children;  // ordered by attachment depth, then start id
  int root = -1;

  std::size_t size() const noexcept { return vertices.size(); }
  std::size_t edge_count() const {
    std::size_t e = 0;
    for (int p : parent) e += p >= 0;
    return e;
  }
};

inline BranchDecompTree build_bdt(const MergeTree& tree, const BranchDecomposition& B) {
  if (!is_decomposition(tree, B)) {
    throw PreconditionError("build_bdt: input is not a decomposition of the tree");
  }
  BranchDecompTree bdt;
  bdt.vertices = B.branches;
  bdt.parent.assign(B.size(), -1);
  bdt.children.resize(B.size());
  if (B.empty()) return bdt;
  bdt.root = static_cast<int>(B.main);
  const auto owner = edge_owner(tree, B);
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (i == B.main) continue;
    const int p = owner[B.branches[i].start];
    bdt.parent[i] = p;
    bdt.children[p].push_back(static_cast<int>(i));
  }
  for (auto& kids : bdt.children) {
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      const NodeId sa = bdt.vertices[a].start;
      const NodeId sb = bdt.vertices[b].start;
      if (tree.depth(sa) != tree.depth(sb)) return tree.depth(sa) < tree.depth(sb);
      return bdt.vertices[a] < bdt.vertices[b];
    });
  }
  return bdt;
}

}  // namespace branchmap
