#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace branchmap {

/// Result of matching two item lists where any item may stay unmatched.
/// row_to_col[i] == -1 means row i is deleted; col_to_row[j] == -1 means
/// column j is inserted.
struct GapAssignment {
  double cost = 0.0;
  std::vector<int> row_to_col;
  std::vector<int> col_to_row;
};

namespace detail {

/// Square Hungarian method with potentials, O(n^3). Returns the column
/// assigned to each row.
inline std::vector<int> hungarian_square(const std::vector<double>& a, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

/// Order-independent total, so that swapping the roles of rows and columns
/// reproduces the same floating-point result.
inline double canonical_sum(std::vector<double>& parts) {
  std::sort(parts.begin(), parts.end());
  double s = 0.0;
  for (double x : parts) s += x;
  return s;
}

}  // namespace detail

/// Minimum-cost matching between `rows` and `cols` items. Each row is either
/// matched to one column at match(i, j) or deleted at del(i); each column
/// is matched or inserted at ins(j).
template <class Match, class Del, class Ins>
GapAssignment solve_gap_assignment(int rows, int cols, Match&& match, Del&& del, Ins&& ins) {
  GapAssignment out;
  out.row_to_col.assign(rows, -1);
  out.col_to_row.assign(cols, -1);
  std::vector<double> parts;
  parts.reserve(rows + cols);

  if (rows == 1 && cols == 1) {
    const double m = match(0, 0);
    const double gap = del(0) + ins(0);
    if (m <= gap) {
      out.row_to_col[0] = 0;
      out.col_to_row[0] = 0;
      out.cost = m;
    } else {
      out.cost = gap;
    }
    return out;
  }
  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) parts.push_back(del(i));
    for (int j = 0; j < cols; ++j) parts.push_back(ins(j));
    out.cost = detail::canonical_sum(parts);
    return out;
  }

  // Square (rows + cols) problem: real columns, then one deletion slot per
  // row; real rows, then one insertion slot per column.
  const int n = rows + cols;
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  double big = 1.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double c = match(i, j);
      m[i * n + j] = c;
      big += std::abs(c);
    }
    const double d = del(i);
    m[i * n + cols + i] = d;
    big += std::abs(d);
  }
  for (int j = 0; j < cols; ++j) {
    const double c = ins(j);
    m[(rows + j) * n + j] = c;
    big += std::abs(c);
  }
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < rows; ++k) {
      if (k != i) m[i * n + cols + k] = big;
    }
  }
  for (int j = 0; j < cols; ++j) {
    for (int k = 0; k < cols; ++k) {
      if (k != j) m[(rows + j) * n + k] = big;
    }
  }
  const auto assigned = detail::hungarian_square(m, n);
  for (int i = 0; i < rows; ++i) {
    const int j = assigned[i];
    if (j < cols) {
      out.row_to_col[i] = j;
      out.col_to_row[j] = i;
      parts.push_back(m[i * n + j]);
    } else {
      parts.push_back(del(i));
    }
  }
  for (int j = 0; j < cols; ++j) {
    if (out.col_to_row[j] < 0) parts.push_back(ins(j));
  }
  out.cost = detail::canonical_sum(parts);
  return out;
}

/// Exhaustive reference for small inputs (tests only use rows, cols <= 5).
template <class Match, class Del, class Ins>
double brute_force_gap_assignment(int rows, int cols, Match&& match, Del&& del, Ins&& ins) {
  std::vector<char> used(cols, 0);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int i, double acc) -> void {
    if (i == rows) {
      double total = acc;
      for (int j = 0; j < cols; ++j) {
        if (!used[j]) total += ins(j);
      }
      best = std::min(best, total);
      return;
    }
    self(self, i + 1, acc + del(i));
    for (int j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, acc + match(i, j));
      used[j] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

}  // namespace branchmap
