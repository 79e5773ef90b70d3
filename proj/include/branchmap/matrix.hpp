#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "branchmap/distance.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"

namespace branchmap {

/// Symmetric matrix of pairwise distances with one label per member.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major, labels.size() squared

  std::size_t size() const noexcept { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * size() + j]; }
};

/// Runs `task(k)` for k in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      const std::size_t k = next++;
      if (k >= count) return;
      try {
        task(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

/// All pairwise distances. Each unordered pair is computed once, with the
/// lower index as the first argument, and mirrored.
inline DistanceMatrix compute_distance_matrix(const std::vector<MergeTree>& trees, std::vector<std::string> labels,
                                              const DistanceConfig& cfg, unsigned jobs = 0) {
  if (labels.size() != trees.size()) throw PreconditionError("distance matrix: one label per tree is required");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto report = validate_merge_tree(trees[i]);
    if (!report.ok()) throw ValidationError("member '" + labels[i] + "': " + report.summary());
  }
  DistanceMatrix m;
  m.labels = std::move(labels);
  const std::size_t n = trees.size();
  m.values.assign(n * n, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double d = tree_distance(trees[i], trees[j], cfg);
    m.values[i * n + j] = d;
    m.values[j * n + i] = d;
  });
  return m;
}

/// Leaf order of single-linkage agglomerative clustering. Clusters merge at
/// their smallest cross distance (ties to the lowest member indices); the
/// left cluster of every merge is the one holding the smaller member index.
inline std::vector<std::size_t> single_linkage_order(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double link = std::numeric_limits<double>::infinity();
        for (std::size_t x : clusters[a]) {
          for (std::size_t y : clusters[b]) link = std::min(link, m.at(x, y));
        }
        if (link < best) {
          best = link;
          ba = a;
          bb = b;
        }
      }
    }
    auto& left = clusters[ba];
    auto& right = clusters[bb];
    if (*std::min_element(right.begin(), right.end()) < *std::min_element(left.begin(), left.end())) {
      std::swap(left, right);
    }
    left.insert(left.end(), right.begin(), right.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return n == 0 ? std::vector<std::size_t>{} : clusters.front();
}

inline DistanceMatrix permuted(const DistanceMatrix& m, const std::vector<std::size_t>& order) {
  DistanceMatrix out;
  const std::size_t n = m.size();
  if (order.size() != n) throw PreconditionError("permuted: order has the wrong length");
  out.values.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    out.labels.push_back(m.labels[order[a]]);
    for (std::size_t b = 0; b < n; ++b) out.values[a * n + b] = m.at(order[a], order[b]);
  }
  return out;
}

}  // namespace branchmap
