#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "branchmap/error.hpp"

namespace branchmap {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Rooted, unordered, scalar-labeled tree with dense node ids.
///
/// Construction only checks that the parent array is indexable; the
/// abstract merge tree rules (degree-one root, branching inner nodes,
/// values strictly increasing away from the root) are checked by
/// validate_merge_tree so that broken inputs can still be inspected.
/// A default-constructed tree has no nodes and stands for the empty tree.
class MergeTree {
 public:
  MergeTree() = default;

  MergeTree(std::vector<double> values, std::vector<NodeId> parents)
      : values_(std::move(values)), parents_(std::move(parents)) {
    if (values_.size() != parents_.size()) {
      throw PreconditionError("merge tree: value and parent arrays differ in length");
    }
    const auto n = static_cast<NodeId>(values_.size());
    children_.resize(values_.size());
    for (NodeId v = 0; v < n; ++v) {
      const NodeId p = parents_[v];
      if (p == kNoNode) {
        if (root_ == kNoNode) root_ = v;
        continue;
      }
      if (p < 0 || p >= n) {
        throw PreconditionError("merge tree: node " + std::to_string(v) +
                                " has out-of-range parent " + std::to_string(p));
      }
      children_[p].push_back(v);
    }
    compute_order();
  }

  bool empty() const noexcept { return values_.empty(); }
  std::size_t size() const noexcept { return values_.size(); }
  NodeId root() const noexcept { return root_; }

  double value(NodeId v) const { return values_[v]; }
  NodeId parent(NodeId v) const { return parents_[v]; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
  bool is_leaf(NodeId v) const { return children_[v].empty(); }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<NodeId>& parents() const noexcept { return parents_; }

  /// True when the parent array describes one connected rooted tree.
  bool well_formed() const noexcept { return well_formed_; }

  /// Number of edges between v and the root. Requires well_formed().
  int depth(NodeId v) const { return depth_[v]; }

  /// Largest node depth. Zero for trees with fewer than two nodes.
  int height() const noexcept { return height_; }

  /// Children before parents; the root comes last. Requires well_formed().
  const std::vector<NodeId>& postorder() const noexcept { return postorder_; }

  std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < static_cast<NodeId>(size()); ++v) {
      if (is_leaf(v) && v != root_) out.push_back(v);
    }
    return out;
  }

  /// a == d or a lies on the path from d to the root.
  bool is_ancestor_or_self(NodeId a, NodeId d) const {
    while (d != kNoNode && depth_[d] > depth_[a]) d = parents_[d];
    return d == a;
  }

  bool is_strict_ancestor(NodeId a, NodeId d) const { return a != d && is_ancestor_or_self(a, d); }

 private:
  void compute_order() {
    const std::size_t n = values_.size();
    depth_.assign(n, -1);
    if (n == 0) {
      well_formed_ = true;
      return;
    }
    if (root_ == kNoNode) return;
    for (std::size_t v = 0; v < n; ++v) {
      if (parents_[v] == kNoNode && static_cast<NodeId>(v) != root_) return;
    }
    // Iterative DFS; emits postorder with children in ascending id order.
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    depth_[root_] = 0;
    postorder_.reserve(n);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children_[v].size()) {
        const NodeId c = children_[v][next++];
        if (depth_[c] != -1) return;  // revisited: not a tree
        depth_[c] = depth_[v] + 1;
        height_ = std::max(height_, depth_[c]);
        stack.emplace_back(c, 0);
      } else {
        postorder_.push_back(v);
        stack.pop_back();
      }
    }
    if (postorder_.size() != n) {
      postorder_.clear();
      height_ = 0;
      return;
    }
    well_formed_ = true;
  }

  std::vector<double> values_;
  std::vector<NodeId> parents_;
  std::vector<std::vector<NodeId>> children_;
  NodeId root_ = kNoNode;
  bool well_formed_ = false;
  std::vector<int> depth_;
  std::vector<NodeId> postorder_;
  int height_ = 0;
};

enum class ViolationKind {
  kNoRoot,
  kMultipleRoots,
  kNotConnected,
  kRootDegree,
  kInnerDegree,
  kNotIncreasing,
};

struct Violation {
  ViolationKind kind;
  NodeId node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
  std::string summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) out << "; ";
      out << violations[i].message;
    }
    return out.str();
  }
};

/// Checks the abstract merge tree rules. The empty tree is valid.
/// Violations are data: each names the offending node.
inline ValidationReport validate_merge_tree(const MergeTree& tree) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, NodeId node, const std::string& text) {
    report.violations.push_back({kind, node, text + " at node " + std::to_string(node)});
  };
  const auto n = static_cast<NodeId>(tree.size());
  if (n == 0) return report;

  std::vector<NodeId> roots;
  for (NodeId v = 0; v < n; ++v) {
    if (tree.parent(v) == kNoNode) roots.push_back(v);
  }
  if (roots.empty()) add(ViolationKind::kNoRoot, 0, "no root (every node has a parent)");
  for (std::size_t i = 1; i < roots.size(); ++i) {
    add(ViolationKind::kMultipleRoots, roots[i], "more than one root");
  }
  if (!roots.empty() && roots.size() == 1 && !tree.well_formed()) {
    add(ViolationKind::kNotConnected, roots[0], "edges do not form a single rooted tree");
  }

  for (NodeId v = 0; v < n; ++v) {
    const auto degree = tree.children(v).size();
    if (tree.parent(v) == kNoNode) {
      if (degree != 1) add(ViolationKind::kRootDegree, v, "root degree != 1");
    } else if (degree == 1) {
      add(ViolationKind::kInnerDegree, v, "inner node with a single child");
    }
    for (NodeId c : tree.children(v)) {
      if (!(tree.value(c) > tree.value(v))) {
        add(ViolationKind::kNotIncreasing, c, "non-increasing toward root");
      }
    }
  }
  return report;
}

inline void require_valid(const MergeTree& tree, const char* what = "merge tree") {
  auto report = validate_merge_tree(tree);
  if (!report.ok()) throw ValidationError(std::string(what) + ": " + report.summary());
}

/// The degree-one root's only child, or kNoNode for the empty tree.
inline NodeId root_child(const MergeTree& tree) {
  if (tree.empty()) return kNoNode;
  return tree.children(tree.root()).front();
}

}  // namespace branchmap
