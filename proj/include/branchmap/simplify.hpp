#pragma once

#include <cstddef>
#include <vector>

#include "branchmap/decomposition.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"

namespace branchmap {

struct SimplifiedTree {
  MergeTree tree;
  std::vector<NodeId> origin;  // node id in the input tree
};

/// Persistence simplification. Drops every elder-rule branch other than the
/// main one whose persistence is below `threshold`, then splices out inner
/// nodes left with a single child. Branches hanging off a dropped branch are
/// always less persistent than it, so this equals repeatedly pruning the
/// least persistent prunable leaf.
inline SimplifiedTree simplify_with_origin(const MergeTree& tree, double threshold) {
  require_valid(tree);
  if (!(threshold >= 0.0)) throw PreconditionError("simplify: threshold must be non-negative");
  SimplifiedTree out;
  if (tree.empty()) return out;

  const auto B = elder_rule_decomposition(tree);
  const std::size_t n = tree.size();
  std::vector<char> keep(n, 0);
  keep[tree.root()] = 1;
  for (std::size_t i = 0; i < B.size(); ++i) {
    const Branch& b = B.branches[i];
    if (i != B.main && tree.value(b.leaf) - tree.value(b.start) < threshold) continue;
    for (NodeId v = b.leaf; v != b.start; v = tree.parent(v)) keep[v] = 1;
  }
  // Inner nodes with one surviving child disappear.
  auto kept_children = [&](NodeId v) {
    int k = 0;
    for (NodeId c : tree.children(v)) k += keep[c];
    return k;
  };
  std::vector<char> node(n, 0);
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    node[v] = keep[v] && (v == tree.root() || tree.is_leaf(v) || kept_children(v) >= 2);
  }
  std::vector<NodeId> index(n, kNoNode);
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    if (!node[v]) continue;
    index[v] = static_cast<NodeId>(out.origin.size());
    out.origin.push_back(v);
  }
  std::vector<double> values;
  std::vector<NodeId> parents;
  for (NodeId v : out.origin) {
    values.push_back(tree.value(v));
    NodeId p = tree.parent(v);
    while (p != kNoNode && !node[p]) p = tree.parent(p);
    parents.push_back(p == kNoNode ? kNoNode : index[p]);
  }
  out.tree = MergeTree(std::move(values), std::move(parents));
  return out;
}

inline MergeTree simplify(const MergeTree& tree, double threshold) {
  return simplify_with_origin(tree, threshold).tree;
}

}  // namespace branchmap
