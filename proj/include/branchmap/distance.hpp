#pragma once

#include <string>
#include <string_view>

#include "branchmap/baselines.hpp"
#include "branchmap/branch_mapping.hpp"
#include "branchmap/error.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/metric.hpp"

namespace branchmap {

enum class DistanceKind {
  kBranch,       // branch mapping distance over all decompositions
  kBranchFixed,  // branch mapping distance on the elder-rule decompositions
  kConstrained,  // constrained edit distance on the elder-labeled merge trees
  kOneDegree,    // one-degree distance on the elder-rule decomposition trees
};

struct DistanceConfig {
  DistanceKind kind = DistanceKind::kBranch;
  BaseMetric metric{MetricKind::kBirthPersistenceL1};
  Aggregation mode = Aggregation::kSum;
};

inline DistanceKind parse_distance(std::string_view name) {
  if (name == "branch") return DistanceKind::kBranch;
  if (name == "branch-fixed") return DistanceKind::kBranchFixed;
  if (name == "constrained") return DistanceKind::kConstrained;
  if (name == "one-degree") return DistanceKind::kOneDegree;
  throw PreconditionError("unknown distance '" + std::string(name) + "'");
}

inline std::string_view distance_name(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::kBranch:
      return "branch";
    case DistanceKind::kBranchFixed:
      return "branch-fixed";
    case DistanceKind::kConstrained:
      return "constrained";
    case DistanceKind::kOneDegree:
      return "one-degree";
  }
  return "?";
}

inline bool has_branch_mapping(DistanceKind kind) noexcept {
  return kind == DistanceKind::kBranch || kind == DistanceKind::kBranchFixed;
}

/// Branch mapping result for the two branch distance kinds.
inline BranchMappingResult branch_distance(const MergeTree& t1, const MergeTree& t2, const DistanceConfig& cfg,
                                           bool with_mapping = true) {
  switch (cfg.kind) {
    case DistanceKind::kBranch:
      return branch_mapping_distance(t1, t2, cfg.metric, cfg.mode, std::nullopt, with_mapping);
    case DistanceKind::kBranchFixed:
      return elder_branch_mapping_distance(t1, t2, cfg.metric, cfg.mode, with_mapping);
    default:
      throw PreconditionError("distance '" + std::string(distance_name(cfg.kind)) + "' has no branch mapping");
  }
}

inline double tree_distance(const MergeTree& t1, const MergeTree& t2, const DistanceConfig& cfg) {
  switch (cfg.kind) {
    case DistanceKind::kBranch:
    case DistanceKind::kBranchFixed:
      return branch_distance(t1, t2, cfg, false).distance;
    case DistanceKind::kConstrained:
      return constrained_edit_distance(elder_labeled_inputs(t1, LabeledTarget::kMergeTree),
                                       elder_labeled_inputs(t2, LabeledTarget::kMergeTree), cfg.metric, cfg.mode);
    case DistanceKind::kOneDegree:
      return one_degree_distance(elder_labeled_inputs(t1, LabeledTarget::kBdt),
                                 elder_labeled_inputs(t2, LabeledTarget::kBdt), cfg.metric, cfg.mode);
  }
  return 0.0;
}

}  // namespace branchmap
