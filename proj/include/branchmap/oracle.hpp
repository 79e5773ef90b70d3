#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "branchmap/branch_mapping.hpp"
#include "branchmap/decomposition.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/metric.hpp"

namespace branchmap {

struct OracleResult {
  double distance = 0.0;
  BranchMapping mapping;
  std::size_t decomposition_pairs = 0;
};

namespace detail {

/// Best branch mapping for one fixed pair of decompositions, by recursive
/// matching of their branch decomposition trees. Children of two paired
/// branches may only be paired when the order of their attachment points
/// along the parents agrees on both sides (ties included).
class BdtMatcher {
 public:
  BdtMatcher(const MergeTree& t1, const BranchDecomposition& b1, const MergeTree& t2,
             const BranchDecomposition& b2, const BaseMetric& metric, Aggregation mode)
      : t1_(t1), t2_(t2), bdt1_(build_bdt(t1, b1)), bdt2_(build_bdt(t2, b2)), metric_(metric), mode_(mode) {}

  double solve() { return f(bdt1_.root, bdt2_.root); }

  void emit(BranchMapping& m) const { emit_pair(bdt1_.root, bdt2_.root, m); }

 private:
  BranchLabel label1(int a) const {
    return {t1_.value(bdt1_.vertices[a].start), t1_.value(bdt1_.vertices[a].leaf)};
  }
  BranchLabel label2(int b) const {
    return {t2_.value(bdt2_.vertices[b].start), t2_.value(bdt2_.vertices[b].leaf)};
  }

  double delete_subtree(const BranchDecompTree& bdt, bool first, int v) const {
    double s = contribution(metric_.deletion(first ? label1(v) : label2(v)), mode_);
    for (int c : bdt.children[v]) s += delete_subtree(bdt, first, c);
    return s;
  }

  static int compare(int x, int y) { return (x > y) - (x < y); }

  double f(int a, int b) {
    const auto key = std::make_pair(a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;

    const auto& k1 = bdt1_.children[a];
    const auto& k2 = bdt2_.children[b];
    std::vector<int> d1, d2;
    for (int c : k1) d1.push_back(t1_.depth(bdt1_.vertices[c].start));
    for (int c : k2) d2.push_back(t2_.depth(bdt2_.vertices[c].start));

    std::vector<int> partner(k1.size(), -1), best_partner(k1.size(), -1);
    std::vector<char> used(k2.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    auto rec = [&](auto&& self, std::size_t i, double acc) -> void {
      if (i == k1.size()) {
        for (std::size_t j = 0; j < k2.size(); ++j) {
          if (!used[j]) acc += delete_subtree(bdt2_, false, k2[j]);
        }
        if (acc < best) {
          best = acc;
          best_partner = partner;
        }
        return;
      }
      partner[i] = -1;
      self(self, i + 1, acc + delete_subtree(bdt1_, true, k1[i]));
      for (std::size_t j = 0; j < k2.size(); ++j) {
        if (used[j]) continue;
        bool consistent = true;
        for (std::size_t q = 0; q < i && consistent; ++q) {
          if (partner[q] < 0) continue;
          consistent = compare(d1[i], d1[q]) == compare(d2[j], d2[partner[q]]);
        }
        if (!consistent) continue;
        used[j] = 1;
        partner[i] = static_cast<int>(j);
        self(self, i + 1, acc + f(k1[i], k2[j]));
        partner[i] = -1;
        used[j] = 0;
      }
    };
    rec(rec, 0, 0.0);
    const double total = contribution(metric_.match(label1(a), label2(b)), mode_) + best;
    memo_[key] = {total, best_partner};
    return total;
  }

  void emit_deleted(const BranchDecompTree& bdt, bool first, int v, std::vector<BranchEdit>& out) const {
    out.push_back({bdt.vertices[v], metric_.deletion(first ? label1(v) : label2(v))});
    for (int c : bdt.children[v]) emit_deleted(bdt, first, c, out);
  }

  void emit_pair(int a, int b, BranchMapping& m) const {
    m.pairs.push_back({bdt1_.vertices[a], bdt2_.vertices[b], metric_.match(label1(a), label2(b))});
    const auto& partner = memo_.at({a, b}).second;
    const auto& k1 = bdt1_.children[a];
    const auto& k2 = bdt2_.children[b];
    std::vector<char> used(k2.size(), 0);
    for (std::size_t i = 0; i < k1.size(); ++i) {
      if (partner[i] < 0) {
        emit_deleted(bdt1_, true, k1[i], m.deletions);
      } else {
        used[partner[i]] = 1;
        emit_pair(k1[i], k2[partner[i]], m);
      }
    }
    for (std::size_t j = 0; j < k2.size(); ++j) {
      if (!used[j]) emit_deleted(bdt2_, false, k2[j], m.insertions);
    }
  }

  const MergeTree& t1_;
  const MergeTree& t2_;
  BranchDecompTree bdt1_;
  BranchDecompTree bdt2_;
  BaseMetric metric_;
  Aggregation mode_;
  std::map<std::pair<int, int>, std::pair<double, std::vector<int>>> memo_;
};

}  // namespace detail

/// Exact minimum over every branch mapping of every pair of decompositions.
/// Exponential; refuses trees with more than `max_leaves` leaves.
inline OracleResult oracle_distance(const MergeTree& t1, const MergeTree& t2, const BaseMetric& metric,
                                    Aggregation mode, std::size_t max_leaves = 7) {
  require_valid(t1, "first tree");
  require_valid(t2, "second tree");
  for (const MergeTree* t : {&t1, &t2}) {
    if (t->leaves().size() > max_leaves) {
      throw SizeLimitError("oracle_distance: " + std::to_string(t->leaves().size()) +
                           " leaves exceeds cap of " + std::to_string(max_leaves));
    }
  }
  OracleResult out;
  out.mapping.metric = metric.kind;
  out.mapping.mode = mode;
  if (t1.empty() || t2.empty()) {
    // Only deletions are possible; every decomposition is a candidate.
    const MergeTree& t = t1.empty() ? t2 : t1;
    double best = 0.0;
    BranchDecomposition arg;
    bool first = true;
    for (const auto& B : enumerate_branch_decompositions(t, max_leaves)) {
      double acc = 0.0;
      for (const Branch& b : B.branches) {
        acc += contribution(metric.deletion({t.value(b.start), t.value(b.leaf)}), mode);
      }
      ++out.decomposition_pairs;
      if (first || acc < best) {
        best = acc;
        arg = B;
        first = false;
      }
    }
    auto& edits = t1.empty() ? out.mapping.insertions : out.mapping.deletions;
    (t1.empty() ? out.mapping.second : out.mapping.first) = arg;
    for (const Branch& b : arg.branches) {
      edits.push_back({b, metric.deletion({t.value(b.start), t.value(b.leaf)})});
    }
    out.distance = finish(best, mode);
    out.mapping.total_cost = out.distance;
    return out;
  }

  const auto all1 = enumerate_branch_decompositions(t1, max_leaves);
  const auto all2 = enumerate_branch_decompositions(t2, max_leaves);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& B1 : all1) {
    for (const auto& B2 : all2) {
      detail::BdtMatcher matcher(t1, B1, t2, B2, metric, mode);
      const double v = matcher.solve();
      ++out.decomposition_pairs;
      if (v < best) {
        best = v;
        BranchMapping m;
        m.metric = metric.kind;
        m.mode = mode;
        m.first = B1;
        m.second = B2;
        matcher.emit(m);
        out.mapping = std::move(m);
      }
    }
  }
  std::vector<double> costs;
  for (const auto& p : out.mapping.pairs) costs.push_back(p.cost);
  for (const auto& d : out.mapping.deletions) costs.push_back(d.cost);
  for (const auto& d : out.mapping.insertions) costs.push_back(d.cost);
  out.mapping.total_cost = aggregate(costs, mode);
  out.distance = finish(best, mode);
  return out;
}

}  // namespace branchmap
