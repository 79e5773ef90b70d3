#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchmap/assignment.hpp"
#include "branchmap/decomposition.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/metric.hpp"

namespace branchmap {

struct BranchPair {
  Branch first;
  Branch second;
  double cost = 0.0;
};

struct BranchEdit {
  Branch branch;
  double cost = 0.0;
};

/// Branch mapping between two decompositions together with the edit
/// operations it implies. Costs are per-operation base costs; total_cost
/// aggregates all of them under `mode`.
struct BranchMapping {
  BranchDecomposition first;
  BranchDecomposition second;
  std::vector<BranchPair> pairs;
  std::vector<BranchEdit> deletions;   // branches of `first` mapped to nothing
  std::vector<BranchEdit> insertions;  // branches of `second` mapped from nothing
  double total_cost = 0.0;
  MetricKind metric = MetricKind::kBirthPersistenceL1;
  Aggregation mode = Aggregation::kSum;
};

/// Size of the memo table used by one distance computation.
struct MemoStats {
  std::size_t keys = 0;   // (n1,p1,n2,p2) entries plus the two deletion tables
  std::size_t bound = 0;  // |T1| * height(T1) * |T2| * height(T2)
  bool ancestor_keys = true;  // every stored p is a strict ancestor of its n
};

struct FixedDecompositions {
  BranchDecomposition first;
  BranchDecomposition second;
};

struct BranchMappingResult {
  double distance = 0.0;
  BranchMapping mapping;
  MemoStats stats;
};

namespace detail {

/// Enumerates the (n, p) subtree keys of one tree. A key stands for the
/// tree made of the edge p -> n (p an ancestor of n, the path between them
/// contracted) and everything below n. In free mode every strict ancestor
/// is a candidate p; with a fixed decomposition p is the start of the
/// branch running through n and the continuation child is prescribed.
class StateSpace {
 public:
  StateSpace(const MergeTree& tree, const BranchDecomposition* fixed)
      : tree_(tree), fixed_(fixed != nullptr) {
    const std::size_t n = tree.size();
    offset_.assign(n, 0);
    count_.assign(n, 0);
    if (fixed_) {
      next_ = continuation_children(tree, *fixed);
      top_.assign(n, kNoNode);
      for (const Branch& b : fixed->branches) {
        for (NodeId v = b.leaf; v != b.start; v = tree.parent(v)) top_[v] = b.start;
      }
    }
    std::size_t total = 0;
    for (NodeId v : tree.postorder()) {
      if (v == tree.root()) continue;
      offset_[v] = total;
      count_[v] = fixed_ ? 1 : static_cast<std::size_t>(tree.depth(v));
      total += count_[v];
    }
    size_ = total;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t count(NodeId n) const { return count_[n]; }
  bool fixed() const noexcept { return fixed_; }

  /// Key of (n, p) where p is the k-th candidate of n.
  std::size_t index(NodeId n, std::size_t k) const { return offset_[n] + k; }

  /// Key of (c, p) for a continuation child c of n, p being n's k-th candidate.
  std::size_t continued(NodeId c, std::size_t k) const { return offset_[c] + (fixed_ ? 0 : k + 1); }

  /// Key of (c, n) for any child c of n that starts a new branch at n.
  std::size_t started(NodeId c) const { return offset_[c]; }

  NodeId candidate(NodeId n, std::size_t k) const {
    if (fixed_) return top_[n];
    NodeId p = tree_.parent(n);
    for (std::size_t i = 0; i < k; ++i) p = tree_.parent(p);
    return p;
  }

  /// Child positions the branch entering n may continue into.
  template <class F>
  void for_each_continuation(NodeId n, F&& f) const {
    const auto& kids = tree_.children(n);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (!fixed_ || kids[i] == next_[n]) f(i);
    }
  }

  bool ancestor_discipline() const {
    for (NodeId v : tree_.postorder()) {
      if (v == tree_.root()) continue;
      for (std::size_t k = 0; k < count_[v]; ++k) {
        if (!tree_.is_strict_ancestor(candidate(v, k), v)) return false;
      }
    }
    return true;
  }

 private:
  const MergeTree& tree_;
  bool fixed_;
  std::vector<NodeId> next_;
  std::vector<NodeId> top_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> count_;
  std::size_t size_ = 0;
};

/// Optimal deletion cost of every (n, p) subtree of one tree.
class DeletionTable {
 public:
  DeletionTable(const MergeTree& tree, const StateSpace& space, const BaseMetric& metric,
                Aggregation mode)
      : tree_(tree), space_(space) {
    cost_.assign(space.size(), 0.0);
    choice_.assign(space.size(), 0);
    rest_.assign(tree.size(), 0.0);
    for (NodeId n : tree.postorder()) {
      if (n == tree.root()) continue;
      const auto& kids = tree.children(n);
      if (!kids.empty()) {
        // rest_[c]: deleting every child subtree of n except c's.
        space.for_each_continuation(n, [&](std::size_t i) {
          double s = 0.0;
          for (std::size_t o = 0; o < kids.size(); ++o) {
            if (o != i) s += cost_[space.started(kids[o])];
          }
          rest_[kids[i]] = s;
        });
      }
      for (std::size_t k = 0; k < space.count(n); ++k) {
        const std::size_t key = space.index(n, k);
        if (kids.empty()) {
          const NodeId p = space.candidate(n, k);
          cost_[key] = contribution(metric.deletion({tree.value(p), tree.value(n)}), mode);
          continue;
        }
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        space.for_each_continuation(n, [&](std::size_t i) {
          const double v = cost_[space.continued(kids[i], k)] + rest_[kids[i]];
          if (v < best) {
            best = v;
            arg = static_cast<std::uint32_t>(i);
          }
        });
        cost_[key] = best;
        choice_[key] = arg;
      }
    }
  }

  double operator[](std::size_t key) const { return cost_[key]; }
  std::uint32_t choice(std::size_t key) const { return choice_[key]; }
  double rest(NodeId child) const { return rest_[child]; }

 private:
  const MergeTree& tree_;
  const StateSpace& space_;
  std::vector<double> cost_;
  std::vector<std::uint32_t> choice_;
  std::vector<double> rest_;
};

enum class Step : std::uint32_t { kBase = 0, kAdvanceFirst = 1, kAdvanceSecond = 2, kAdvanceBoth = 3 };

inline std::uint32_t encode(Step s, std::size_t i, std::size_t j) {
  return (static_cast<std::uint32_t>(s) << 30) | (static_cast<std::uint32_t>(i) << 15) |
         static_cast<std::uint32_t>(j);
}
inline Step step_of(std::uint32_t d) { return static_cast<Step>(d >> 30); }
inline std::size_t first_of(std::uint32_t d) { return (d >> 15) & 0x7fffu; }
inline std::size_t second_of(std::uint32_t d) { return d & 0x7fffu; }

/// Bottom-up evaluation of the branch mapping recursion over all pairs of
/// subtree keys, with optional backtracking to recover the mapping.
class BranchMappingSolver {
 public:
  BranchMappingSolver(const MergeTree& t1, const MergeTree& t2, const BaseMetric& metric,
                      Aggregation mode, const FixedDecompositions* fixed, bool keep_decisions)
      : t1_(t1),
        t2_(t2),
        metric_(metric),
        mode_(mode),
        s1_(t1, fixed ? &fixed->first : nullptr),
        s2_(t2, fixed ? &fixed->second : nullptr),
        del1_(t1, s1_, metric, mode),
        del2_(t2, s2_, metric, mode),
        keep_decisions_(keep_decisions) {}

  MemoStats stats() const {
    MemoStats st;
    const std::size_t pair_keys = (t1_.empty() || t2_.empty()) ? 0 : s1_.size() * s2_.size();
    st.keys = pair_keys + s1_.size() + s2_.size();
    st.bound = t1_.size() * static_cast<std::size_t>(t1_.height()) * t2_.size() *
               static_cast<std::size_t>(t2_.height());
    st.ancestor_keys = s1_.ancestor_discipline() && s2_.ancestor_discipline();
    return st;
  }

  /// Optimal accumulated cost (before the final square root in l2 mode).
  double solve() {
    if (t1_.empty() && t2_.empty()) return 0.0;
    if (t2_.empty()) return del1_[s1_.index(root_child(t1_), 0)];
    if (t1_.empty()) return del2_[s2_.index(root_child(t2_), 0)];
    fill();
    return value_[key(s1_.index(root_child(t1_), 0), s2_.index(root_child(t2_), 0))];
  }

  BranchMapping reconstruct() const {
    BranchMapping m;
    m.metric = metric_.kind;
    m.mode = mode_;
    if (!t1_.empty() && !t2_.empty()) {
      emit_pair(root_child(t1_), 0, root_child(t2_), 0, m);
    } else if (!t1_.empty()) {
      emit_deletion(t1_, s1_, del1_, root_child(t1_), 0, m.deletions);
    } else if (!t2_.empty()) {
      emit_deletion(t2_, s2_, del2_, root_child(t2_), 0, m.insertions);
    }
    std::vector<Branch> b1, b2;
    std::vector<double> costs;
    for (const auto& p : m.pairs) {
      b1.push_back(p.first);
      b2.push_back(p.second);
      costs.push_back(p.cost);
    }
    for (const auto& d : m.deletions) {
      b1.push_back(d.branch);
      costs.push_back(d.cost);
    }
    for (const auto& d : m.insertions) {
      b2.push_back(d.branch);
      costs.push_back(d.cost);
    }
    m.first = canonical_decomposition(t1_, std::move(b1));
    m.second = canonical_decomposition(t2_, std::move(b2));
    m.total_cost = aggregate(costs, mode_);
    return m;
  }

 private:
  std::size_t key(std::size_t a, std::size_t b) const { return a * s2_.size() + b; }

  static BranchDecomposition canonical_decomposition(const MergeTree& tree, std::vector<Branch> bs) {
    BranchDecomposition B;
    if (tree.empty()) return B;
    std::sort(bs.begin(), bs.end());
    auto main = std::find_if(bs.begin(), bs.end(), [&](const Branch& b) { return b.start == tree.root(); });
    if (main != bs.end()) std::rotate(bs.begin(), main, main + 1);
    B.branches = std::move(bs);
    return B;
  }

  /// Continuation pairs in the order the options are tried. For two binary
  /// nodes this is the order of the four simultaneous-advance cases of the
  /// reference recursion; otherwise row-major.
  std::vector<std::pair<std::size_t, std::size_t>> both_order(NodeId n1, NodeId n2) const {
    std::vector<std::size_t> a, b;
    s1_.for_each_continuation(n1, [&](std::size_t i) { a.push_back(i); });
    s2_.for_each_continuation(n2, [&](std::size_t j) { b.push_back(j); });
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (a.size() == 2 && b.size() == 2 && a[0] == 0 && a[1] == 1 && b[0] == 0 && b[1] == 1) {
      return {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    }
    for (std::size_t i : a) {
      for (std::size_t j : b) out.emplace_back(i, j);
    }
    return out;
  }

  /// Matching of the children of n1 and n2 that do not continue the tracked
  /// branches; matched children start new, paired branches at n1 and n2.
  GapAssignment side_assignment(NodeId n1, std::size_t skip1, NodeId n2, std::size_t skip2) const {
    const auto& k1 = t1_.children(n1);
    const auto& k2 = t2_.children(n2);
    std::vector<NodeId> rows, cols;
    for (std::size_t i = 0; i < k1.size(); ++i) {
      if (i != skip1) rows.push_back(k1[i]);
    }
    for (std::size_t j = 0; j < k2.size(); ++j) {
      if (j != skip2) cols.push_back(k2[j]);
    }
    return solve_gap_assignment(
        static_cast<int>(rows.size()), static_cast<int>(cols.size()),
        [&](int i, int j) { return value_[key(s1_.started(rows[i]), s2_.started(cols[j]))]; },
        [&](int i) { return del1_[s1_.started(rows[i])]; },
        [&](int j) { return del2_[s2_.started(cols[j])]; });
  }

  void fill() {
    const std::size_t total = s1_.size() * s2_.size();
    value_.assign(total, 0.0);
    if (keep_decisions_) decision_.assign(total, 0);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> both;  // side-assignment cost per continuation pair
    for (NodeId n1 : t1_.postorder()) {
      if (n1 == t1_.root()) continue;
      const auto& kids1 = t1_.children(n1);
      const bool leaf1 = kids1.empty();
      for (NodeId n2 : t2_.postorder()) {
        if (n2 == t2_.root()) continue;
        const auto& kids2 = t2_.children(n2);
        const bool leaf2 = kids2.empty();

        std::vector<std::pair<std::size_t, std::size_t>> order;
        if (!leaf1 && !leaf2) {
          order = both_order(n1, n2);
          both.assign(order.size(), 0.0);
          for (std::size_t o = 0; o < order.size(); ++o) {
            both[o] = side_assignment(n1, order[o].first, n2, order[o].second).cost;
          }
        }

        for (std::size_t k1 = 0; k1 < s1_.count(n1); ++k1) {
          const std::size_t row = s1_.index(n1, k1);
          for (std::size_t k2 = 0; k2 < s2_.count(n2); ++k2) {
            const std::size_t col = s2_.index(n2, k2);
            double best = inf;
            std::uint32_t dec = encode(Step::kBase, 0, 0);
            if (leaf1 && leaf2) {
              const NodeId p1 = s1_.candidate(n1, k1);
              const NodeId p2 = s2_.candidate(n2, k2);
              best = contribution(metric_.match({t1_.value(p1), t1_.value(n1)},
                                                {t2_.value(p2), t2_.value(n2)}),
                                  mode_);
            } else {
              if (!leaf1) {
                s1_.for_each_continuation(n1, [&](std::size_t i) {
                  const double v = value_[key(s1_.continued(kids1[i], k1), col)] + del1_.rest(kids1[i]);
                  if (v < best) {
                    best = v;
                    dec = encode(Step::kAdvanceFirst, i, 0);
                  }
                });
              }
              if (!leaf2) {
                s2_.for_each_continuation(n2, [&](std::size_t j) {
                  const double v = value_[key(row, s2_.continued(kids2[j], k2))] + del2_.rest(kids2[j]);
                  if (v < best) {
                    best = v;
                    dec = encode(Step::kAdvanceSecond, 0, j);
                  }
                });
              }
              for (std::size_t o = 0; o < order.size(); ++o) {
                const auto [i, j] = order[o];
                const double v =
                    value_[key(s1_.continued(kids1[i], k1), s2_.continued(kids2[j], k2))] + both[o];
                if (v < best) {
                  best = v;
                  dec = encode(Step::kAdvanceBoth, i, j);
                }
              }
            }
            value_[key(row, col)] = best;
            if (keep_decisions_) decision_[key(row, col)] = dec;
          }
        }
      }
    }
  }

  void emit_deletion(const MergeTree& tree, const StateSpace& space, const DeletionTable& del, NodeId n,
                     std::size_t k, std::vector<BranchEdit>& out) const {
    const auto& kids = tree.children(n);
    if (kids.empty()) {
      const NodeId p = space.candidate(n, k);
      out.push_back({{p, n}, metric_.deletion({tree.value(p), tree.value(n)})});
      return;
    }
    const std::size_t i = del.choice(space.index(n, k));
    for (std::size_t o = 0; o < kids.size(); ++o) {
      if (o != i) emit_deletion(tree, space, del, kids[o], 0, out);
    }
    const std::size_t next_k = space.fixed() ? 0 : k + 1;
    emit_deletion(tree, space, del, kids[i], next_k, out);
  }

  void emit_pair(NodeId n1, std::size_t k1, NodeId n2, std::size_t k2, BranchMapping& m) const {
    const std::uint32_t dec = decision_[key(s1_.index(n1, k1), s2_.index(n2, k2))];
    const auto& kids1 = t1_.children(n1);
    const auto& kids2 = t2_.children(n2);
    const std::size_t nk1 = s1_.fixed() ? 0 : k1 + 1;
    const std::size_t nk2 = s2_.fixed() ? 0 : k2 + 1;
    switch (step_of(dec)) {
      case Step::kBase: {
        const NodeId p1 = s1_.candidate(n1, k1);
        const NodeId p2 = s2_.candidate(n2, k2);
        const BranchLabel a{t1_.value(p1), t1_.value(n1)};
        const BranchLabel b{t2_.value(p2), t2_.value(n2)};
        m.pairs.push_back({{p1, n1}, {p2, n2}, metric_.match(a, b)});
        return;
      }
      case Step::kAdvanceFirst: {
        const std::size_t i = first_of(dec);
        for (std::size_t o = 0; o < kids1.size(); ++o) {
          if (o != i) emit_deletion(t1_, s1_, del1_, kids1[o], 0, m.deletions);
        }
        emit_pair(kids1[i], nk1, n2, k2, m);
        return;
      }
      case Step::kAdvanceSecond: {
        const std::size_t j = second_of(dec);
        for (std::size_t o = 0; o < kids2.size(); ++o) {
          if (o != j) emit_deletion(t2_, s2_, del2_, kids2[o], 0, m.insertions);
        }
        emit_pair(n1, k1, kids2[j], nk2, m);
        return;
      }
      case Step::kAdvanceBoth: {
        const std::size_t i = first_of(dec);
        const std::size_t j = second_of(dec);
        const auto sides = side_assignment(n1, i, n2, j);
        std::vector<NodeId> rows, cols;
        for (std::size_t o = 0; o < kids1.size(); ++o) {
          if (o != i) rows.push_back(kids1[o]);
        }
        for (std::size_t o = 0; o < kids2.size(); ++o) {
          if (o != j) cols.push_back(kids2[o]);
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const int c = sides.row_to_col[r];
          if (c < 0) {
            emit_deletion(t1_, s1_, del1_, rows[r], 0, m.deletions);
          } else {
            emit_pair(rows[r], 0, cols[c], 0, m);
          }
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (sides.col_to_row[c] < 0) emit_deletion(t2_, s2_, del2_, cols[c], 0, m.insertions);
        }
        emit_pair(kids1[i], nk1, kids2[j], nk2, m);
        return;
      }
    }
  }

  const MergeTree& t1_;
  const MergeTree& t2_;
  BaseMetric metric_;
  Aggregation mode_;
  StateSpace s1_;
  StateSpace s2_;
  DeletionTable del1_;
  DeletionTable del2_;
  bool keep_decisions_;
  std::vector<double> value_;
  std::vector<std::uint32_t> decision_;
};

}  // namespace detail

/// Branch mapping distance between two merge trees (either may be empty).
///
/// Without `fixed`, the minimum runs over all pairs of branch
/// decompositions; with `fixed` it is restricted to exactly that pair. In
/// l2 mode the recursion minimizes the sum of squared pair costs and the
/// square root is taken at the end. Set `with_mapping` to false to skip
/// storing the decisions needed for backtracking.
inline BranchMappingResult branch_mapping_distance(
    const MergeTree& t1, const MergeTree& t2, const BaseMetric& metric, Aggregation mode,
    const std::optional<FixedDecompositions>& fixed = std::nullopt, bool with_mapping = true) {
  require_valid(t1, "first tree");
  require_valid(t2, "second tree");
  if (fixed) {
    if (!is_decomposition(t1, fixed->first)) {
      throw PreconditionError("fixed decomposition is not a decomposition of the first tree");
    }
    if (!is_decomposition(t2, fixed->second)) {
      throw PreconditionError("fixed decomposition is not a decomposition of the second tree");
    }
  }
  detail::BranchMappingSolver solver(t1, t2, metric, mode, fixed ? &*fixed : nullptr, with_mapping);
  BranchMappingResult result;
  result.distance = finish(solver.solve(), mode);
  result.stats = solver.stats();
  if (with_mapping) {
    result.mapping = solver.reconstruct();
  } else {
    result.mapping.metric = metric.kind;
    result.mapping.mode = mode;
    result.mapping.total_cost = result.distance;
  }
  return result;
}

/// Fixed-mode distance on the elder-rule decompositions of both trees.
inline BranchMappingResult elder_branch_mapping_distance(const MergeTree& t1, const MergeTree& t2,
                                                         const BaseMetric& metric, Aggregation mode,
                                                         bool with_mapping = true) {
  return branch_mapping_distance(
      t1, t2, metric, mode,
      FixedDecompositions{elder_rule_decomposition(t1), elder_rule_decomposition(t2)}, with_mapping);
}

/// Cheapest way to delete the whole tree, over all of its decompositions.
inline double delete_tree_cost(const MergeTree& tree, const BaseMetric& metric, Aggregation mode) {
  return branch_mapping_distance(tree, MergeTree{}, metric, mode, std::nullopt, false).distance;
}

enum class MappingCondition {
  kDecomposition,   // the underlying sets are branch decompositions
  kOneToOne,        // every branch used at most once
  kMainPair,        // main branches matched to each other
  kUpwardClosure,   // parent branches of matched branches are matched
  kOrder,           // attachment order is preserved
  kEditSet,         // deletions / insertions are exactly the unmatched branches
  kCost,            // per-operation and total costs are consistent
};

struct MappingReport {
  struct Issue {
    MappingCondition condition;
    std::string message;
  };
  std::vector<Issue> issues;

  bool ok() const noexcept { return issues.empty(); }
  bool has(MappingCondition c) const {
    return std::any_of(issues.begin(), issues.end(), [c](const Issue& i) { return i.condition == c; });
  }
};

/// Checks a mapping against the branch mapping rules and its cost bookkeeping.
///
/// The order rule is applied in its symmetric form: for pairs (a,b), (a',b')
/// the start of a is a descendant-or-self of the start of a' exactly when
/// the same holds for b and b'. On binary trees, where distinct branches
/// start at distinct nodes, this is the one-directional rule.
inline MappingReport validate_branch_mapping(const MergeTree& t1, const MergeTree& t2,
                                             const BranchMapping& m, double tolerance = 1e-9) {
  MappingReport report;
  auto add = [&](MappingCondition c, std::string msg) { report.issues.push_back({c, std::move(msg)}); };
  auto name = [](const Branch& b) {
    return "(" + std::to_string(b.start) + "," + std::to_string(b.leaf) + ")";
  };

  for (const auto& p : check_decomposition(t1, m.first)) add(MappingCondition::kDecomposition, "first: " + p);
  for (const auto& p : check_decomposition(t2, m.second)) add(MappingCondition::kDecomposition, "second: " + p);
  if (!report.ok()) return report;

  auto position = [](const BranchDecomposition& B, const Branch& b) -> int {
    auto it = std::find(B.branches.begin(), B.branches.end(), b);
    return it == B.branches.end() ? -1 : static_cast<int>(it - B.branches.begin());
  };
  std::vector<int> used1(m.first.size(), 0), used2(m.second.size(), 0);
  std::vector<int> partner1(m.first.size(), -1);
  for (const auto& p : m.pairs) {
    const int a = position(m.first, p.first);
    const int b = position(m.second, p.second);
    if (a < 0 || b < 0) {
      add(MappingCondition::kDecomposition, "pair " + name(p.first) + "-" + name(p.second) +
                                                " uses a branch outside the decompositions");
      continue;
    }
    if (++used1[a] > 1 || ++used2[b] > 1) {
      add(MappingCondition::kOneToOne, "branch used twice in pair " + name(p.first) + "-" + name(p.second));
    }
    partner1[a] = b;
  }
  if (!report.ok()) return report;

  // Edit sets.
  std::vector<int> del_seen(m.first.size(), 0), ins_seen(m.second.size(), 0);
  for (const auto& d : m.deletions) {
    const int a = position(m.first, d.branch);
    if (a < 0 || used1[a] || del_seen[a]++) {
      add(MappingCondition::kEditSet, "deletion " + name(d.branch) + " is not an unmatched branch");
    }
  }
  for (const auto& d : m.insertions) {
    const int b = position(m.second, d.branch);
    if (b < 0 || used2[b] || ins_seen[b]++) {
      add(MappingCondition::kEditSet, "insertion " + name(d.branch) + " is not an unmatched branch");
    }
  }
  for (std::size_t a = 0; a < m.first.size(); ++a) {
    if (!used1[a] && !del_seen[a]) add(MappingCondition::kEditSet, "branch " + name(m.first.branches[a]) + " is neither matched nor deleted");
  }
  for (std::size_t b = 0; b < m.second.size(); ++b) {
    if (!used2[b] && !ins_seen[b]) add(MappingCondition::kEditSet, "branch " + name(m.second.branches[b]) + " is neither matched nor inserted");
  }

  if (!m.first.empty() && !m.second.empty()) {
    if (partner1[m.first.main] != static_cast<int>(m.second.main)) {
      add(MappingCondition::kMainPair, "main branches are not paired");
    }
    const auto bdt1 = build_bdt(t1, m.first);
    const auto bdt2 = build_bdt(t2, m.second);
    for (std::size_t a = 0; a < m.first.size(); ++a) {
      const int b = partner1[a];
      if (b < 0) continue;
      const int pa = bdt1.parent[a];
      const int pb = bdt2.parent[b];
      if (pa < 0 && pb < 0) continue;
      if (pa < 0 || pb < 0 || partner1[pa] != pb) {
        add(MappingCondition::kUpwardClosure, "parents of pair " + name(m.first.branches[a]) + "-" +
                                                  name(m.second.branches[b]) + " are not paired");
      }
    }
  }

  for (std::size_t x = 0; x < m.pairs.size(); ++x) {
    for (std::size_t y = 0; y < m.pairs.size(); ++y) {
      if (x == y) continue;
      const auto& P = m.pairs[x];
      const auto& Q = m.pairs[y];
      const bool below1 = t1.is_ancestor_or_self(Q.first.start, P.first.start);
      const bool below2 = t2.is_ancestor_or_self(Q.second.start, P.second.start);
      if (below1 != below2) {
        add(MappingCondition::kOrder, "pairs " + name(P.first) + "-" + name(P.second) + " and " +
                                          name(Q.first) + "-" + name(Q.second) + " cross");
      }
    }
  }

  const BaseMetric metric{m.metric};
  std::vector<double> costs;
  auto label1 = [&](const Branch& b) { return BranchLabel{t1.value(b.start), t1.value(b.leaf)}; };
  auto label2 = [&](const Branch& b) { return BranchLabel{t2.value(b.start), t2.value(b.leaf)}; };
  for (const auto& p : m.pairs) {
    const double c = metric.match(label1(p.first), label2(p.second));
    if (std::abs(c - p.cost) > tolerance) add(MappingCondition::kCost, "pair cost mismatch for " + name(p.first));
    costs.push_back(c);
  }
  for (const auto& d : m.deletions) {
    const double c = metric.deletion(label1(d.branch));
    if (std::abs(c - d.cost) > tolerance) add(MappingCondition::kCost, "deletion cost mismatch for " + name(d.branch));
    costs.push_back(c);
  }
  for (const auto& d : m.insertions) {
    const double c = metric.deletion(label2(d.branch));
    if (std::abs(c - d.cost) > tolerance) add(MappingCondition::kCost, "insertion cost mismatch for " + name(d.branch));
    costs.push_back(c);
  }
  if (std::abs(aggregate(costs, m.mode) - m.total_cost) > tolerance) {
    add(MappingCondition::kCost, "total cost does not aggregate the edit operations");
  }
  return report;
}

/// Node correspondence implied by a branch mapping: the endpoints of every
/// matched branch pair. Sorted, without duplicates.
inline std::vector<std::pair<NodeId, NodeId>> induced_node_mapping(const MergeTree& t1, const MergeTree& t2,
                                                                   const BranchMapping& m) {
  const auto report = validate_branch_mapping(t1, t2, m);
  if (!report.ok()) {
    throw PreconditionError("induced_node_mapping: invalid mapping: " + report.issues.front().message);
  }
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& p : m.pairs) {
    out.emplace_back(p.first.leaf, p.second.leaf);
    out.emplace_back(p.first.start, p.second.start);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace branchmap
