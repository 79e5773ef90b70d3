#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "branchmap/error.hpp"

namespace branchmap {

/// The two scalar values a pure branch cost may depend on: the value where
/// the branch starts (saddle or root) and the value at its leaf.
struct BranchLabel {
  double low = 0.0;
  double high = 0.0;

  double persistence() const noexcept { return high - low; }
  friend bool operator==(const BranchLabel&, const BranchLabel&) = default;
};

enum class MetricKind {
  kPersistenceDiff,     // |p1 - p2|
  kBirthPersistenceL1,  // |b1 - b2| + |p1 - p2|
  kEuclideanBD,         // straight-line distance of (low, high) points
  kLInfinityBD,         // Chebyshev distance of (low, high) points
};

enum class Aggregation {
  kSum,
  kRootOfSquaredSum,
};

/// Cost model for matching, deleting and inserting branches.
///
/// Deleting a branch costs its distance to the nearest zero-persistence
/// label. Matching two branches costs the smaller of the raw label distance
/// and deleting both, which keeps the cost a metric on labels plus the
/// empty branch.
struct BaseMetric {
  MetricKind kind = MetricKind::kBirthPersistenceL1;

  double deletion(const BranchLabel& a) const noexcept {
    const double p = a.persistence();
    switch (kind) {
      case MetricKind::kEuclideanBD:
        return p / std::sqrt(2.0);
      case MetricKind::kLInfinityBD:
        return p / 2.0;
      case MetricKind::kPersistenceDiff:
      case MetricKind::kBirthPersistenceL1:
        break;
    }
    return p;
  }

  double raw(const BranchLabel& a, const BranchLabel& b) const noexcept {
    const double dl = std::abs(a.low - b.low);
    const double dh = std::abs(a.high - b.high);
    switch (kind) {
      case MetricKind::kPersistenceDiff:
        return std::abs(a.persistence() - b.persistence());
      case MetricKind::kBirthPersistenceL1:
        return dl + std::abs(a.persistence() - b.persistence());
      case MetricKind::kEuclideanBD:
        return std::hypot(dl, dh);
      case MetricKind::kLInfinityBD:
        return std::max(dl, dh);
    }
    return 0.0;
  }

  double match(const BranchLabel& a, const BranchLabel& b) const noexcept {
    return std::min(raw(a, b), deletion(a) + deletion(b));
  }
};

/// Cost of one edit operation; nullopt stands for the empty branch.
inline double branch_cost(const BaseMetric& metric, const std::optional<BranchLabel>& a,
                          const std::optional<BranchLabel>& b) {
  if (a && b) return metric.match(*a, *b);
  if (a) return metric.deletion(*a);
  if (b) return metric.deletion(*b);
  throw PreconditionError("branch_cost: both arguments are the empty branch");
}

/// Value the optimizer accumulates for one pair cost under `mode`.
inline double contribution(double cost, Aggregation mode) noexcept {
  return mode == Aggregation::kSum ? cost : cost * cost;
}

/// Turns an optimized accumulator back into a distance.
inline double finish(double accumulated, Aggregation mode) noexcept {
  return mode == Aggregation::kSum ? accumulated : std::sqrt(accumulated);
}

inline double aggregate(std::span<const double> pair_costs, Aggregation mode) {
  double acc = 0.0;
  for (double c : pair_costs) acc += contribution(c, mode);
  return finish(acc, mode);
}

inline MetricKind parse_metric(std::string_view name) {
  if (name == "persistence") return MetricKind::kPersistenceDiff;
  if (name == "birth-persistence") return MetricKind::kBirthPersistenceL1;
  if (name == "euclidean") return MetricKind::kEuclideanBD;
  if (name == "linf") return MetricKind::kLInfinityBD;
  throw PreconditionError("unknown metric '" + std::string(name) + "'");
}

inline std::string_view metric_name(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::kPersistenceDiff:
      return "persistence";
    case MetricKind::kBirthPersistenceL1:
      return "birth-persistence";
    case MetricKind::kEuclideanBD:
      return "euclidean";
    case MetricKind::kLInfinityBD:
      return "linf";
  }
  return "?";
}

inline Aggregation parse_aggregation(std::string_view name) {
  if (name == "sum") return Aggregation::kSum;
  if (name == "l2") return Aggregation::kRootOfSquaredSum;
  throw PreconditionError("unknown aggregation mode '" + std::string(name) + "'");
}

inline std::string_view aggregation_name(Aggregation mode) noexcept {
  return mode == Aggregation::kSum ? "sum" : "l2";
}

}  // namespace branchmap
