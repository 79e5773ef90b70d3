#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"

namespace branchmap {

/// Row-major scalar values on a rows x cols grid.
struct ScalarField2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  int connectivity = 8;  // 4 or 8

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const ScalarField2D&, const ScalarField2D&) = default;
};

inline void require_valid(const ScalarField2D& field) {
  if (field.rows <= 0 || field.cols <= 0) throw PreconditionError("scalar field: dimensions must be positive");
  if (static_cast<std::size_t>(field.rows) * field.cols != field.values.size()) {
    throw PreconditionError("scalar field: " + std::to_string(field.values.size()) + " values for a " +
                            std::to_string(field.rows) + "x" + std::to_string(field.cols) + " grid");
  }
  if (field.connectivity != 4 && field.connectivity != 8) {
    throw PreconditionError("scalar field: connectivity must be 4 or 8");
  }
  for (double v : field.values) {
    if (!std::isfinite(v)) throw PreconditionError("scalar field: non-finite value");
  }
}

enum class SweepDirection {
  kMaxima,  // superlevel sets; leaves are maxima
  kMinima,  // sublevel sets of the field, computed on its negation
};

namespace detail {

template <class F>
void for_each_neighbor(const ScalarField2D& field, std::size_t v, F&& f) {
  const int r = static_cast<int>(v / field.cols);
  const int c = static_cast<int>(v % field.cols);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if ((dr == 0 && dc == 0) || (field.connectivity == 4 && dr != 0 && dc != 0)) continue;
      const int rr = r + dr, cc = c + dc;
      if (rr < 0 || rr >= field.rows || cc < 0 || cc >= field.cols) continue;
      f(static_cast<std::size_t>(rr) * field.cols + cc);
    }
  }
}

inline std::vector<double> oriented_values(const ScalarField2D& field, SweepDirection dir) {
  std::vector<double> g = field.values;
  if (dir == SweepDirection::kMinima) {
    for (double& x : g) x = -x;
  }
  return g;
}

/// Vertices from highest to lowest; equal values go in ascending index order.
inline std::vector<std::size_t> sweep_order(const std::vector<double>& g) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  return order;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite_into(std::size_t x, std::size_t root) { parent_[find(x)] = find(root); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// A merge tree together with the grid vertex each node came from.
struct FieldTree {
  MergeTree tree;
  std::vector<std::size_t> vertex;
};

/// Join tree of a field by a union-find sweep from the highest value down.
///
/// Equal values are ordered by linear index (the smaller index counts as
/// higher). Node values are the swept values shifted by -1e-9 * index / N,
/// which realizes that order; any edge still not strictly increasing after
/// rounding is lifted to the next representable value. For kMinima the
/// tree is built on the negated field and keeps the negated values.
inline FieldTree compute_field_tree(const ScalarField2D& field, SweepDirection dir = SweepDirection::kMaxima) {
  require_valid(field);
  const std::size_t n = field.size();
  if (n < 2) throw PreconditionError("scalar field: at least two vertices are needed for a merge tree");
  const auto g = detail::oriented_values(field, dir);
  const auto order = detail::sweep_order(g);
  auto shifted = [&](std::size_t v) { return g[v] - 1e-9 * static_cast<double>(v) / static_cast<double>(n); };

  detail::UnionFind uf(n);
  std::vector<char> done(n, 0);
  std::vector<NodeId> top(n, kNoNode);  // per component representative: lowest node so far
  std::vector<double> values;
  std::vector<NodeId> parents;
  FieldTree out;
  auto add_node = [&](double value, std::size_t v) {
    values.push_back(value);
    parents.push_back(kNoNode);
    out.vertex.push_back(v);
    return static_cast<NodeId>(values.size() - 1);
  };

  std::vector<std::size_t> comps;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t v = order[step];
    comps.clear();
    detail::for_each_neighbor(field, v, [&](std::size_t u) {
      if (!done[u]) return;
      const std::size_t r = uf.find(u);
      if (std::find(comps.begin(), comps.end(), r) == comps.end()) comps.push_back(r);
    });
    done[v] = 1;
    if (comps.empty()) {
      top[v] = add_node(shifted(v), v);
      continue;
    }
    NodeId node = kNoNode;
    if (comps.size() >= 2) {
      node = add_node(shifted(v), v);
      for (std::size_t r : comps) parents[top[r]] = node;
    }
    const NodeId keep = node != kNoNode ? node : top[comps.front()];
    for (std::size_t r : comps) uf.unite_into(r, v);
    top[uf.find(v)] = keep;

    if (step + 1 == n) {
      // The lowest vertex closes the tree with a degree-one root.
      const double root_value = node == kNoNode ? shifted(v) : shifted(v) - 1e-9;
      const NodeId root = add_node(root_value, v);
      parents[keep] = root;
    }
  }
  if (comps.empty()) {
    // The last vertex had no processed neighbor: the grid is disconnected.
    throw PreconditionError("scalar field: grid graph is not connected");
  }

  // Parents were created after their children; walk from the root down.
  for (std::size_t k = values.size(); k-- > 0;) {
    const NodeId p = parents[k];
    if (p != kNoNode && !(values[k] > values[p])) values[k] = std::nextafter(values[p], INFINITY);
  }
  out.tree = MergeTree(std::move(values), std::move(parents));
  return out;
}

inline MergeTree compute_merge_tree(const ScalarField2D& field, SweepDirection dir = SweepDirection::kMaxima) {
  return compute_field_tree(field, dir).tree;
}

/// Vertices that come before all of their neighbors in the sweep order,
/// found by a direct scan.
inline std::vector<std::size_t> local_maxima(const ScalarField2D& field, SweepDirection dir = SweepDirection::kMaxima) {
  require_valid(field);
  const auto g = detail::oriented_values(field, dir);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < field.size(); ++v) {
    bool top = true;
    detail::for_each_neighbor(field, v, [&](std::size_t u) {
      if (g[u] > g[v] || (g[u] == g[v] && u < v)) top = false;
    });
    if (top) out.push_back(v);
  }
  return out;
}

}  // namespace branchmap
