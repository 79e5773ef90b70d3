#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "branchmap/distance.hpp"
#include "branchmap/error.hpp"
#include "branchmap/matrix.hpp"
#include "branchmap/merge_tree.hpp"

namespace branchmap {

/// Leaf correspondence between time steps t and t+1.
struct TrackStep {
  double distance = 0.0;
  std::vector<std::pair<NodeId, NodeId>> leaf_pairs;  // sorted by the first leaf
};

/// A feature followed through consecutive steps: leaves[k] is its leaf at
/// step first_step + k.
struct Track {
  int id = 0;
  int first_step = 0;
  std::vector<NodeId> leaves;

  int last_step() const { return first_step + static_cast<int>(leaves.size()) - 1; }
};

struct TrackingResult {
  std::vector<TrackStep> steps;
  std::vector<Track> tracks;
};

/// Chains the leaf pairs of the optimal branch mappings between consecutive
/// trees into tracks. A leaf without a partner in the previous step starts a
/// new track; a leaf without a partner in the next step ends its track.
inline TrackingResult track_features(const std::vector<MergeTree>& series, const DistanceConfig& cfg,
                                     unsigned jobs = 0) {
  if (series.size() < 2) throw PreconditionError("tracking: at least two time steps are needed");
  if (!has_branch_mapping(cfg.kind)) {
    throw PreconditionError("tracking: distance '" + std::string(distance_name(cfg.kind)) +
                            "' does not produce branch mappings");
  }
  TrackingResult out;
  out.steps.resize(series.size() - 1);
  parallel_for(out.steps.size(), jobs, [&](std::size_t t) {
    const auto r = branch_distance(series[t], series[t + 1], cfg);
    out.steps[t].distance = r.distance;
    for (const auto& p : r.mapping.pairs) out.steps[t].leaf_pairs.emplace_back(p.first.leaf, p.second.leaf);
    std::sort(out.steps[t].leaf_pairs.begin(), out.steps[t].leaf_pairs.end());
  });

  std::map<NodeId, std::size_t> active;  // leaf at the current step -> track index
  for (NodeId leaf : series[0].leaves()) {
    active[leaf] = out.tracks.size();
    out.tracks.push_back({static_cast<int>(out.tracks.size()), 0, {leaf}});
  }
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    std::map<NodeId, NodeId> forward(out.steps[t].leaf_pairs.begin(), out.steps[t].leaf_pairs.end());
    std::map<NodeId, std::size_t> backward;
    for (const auto& [leaf, track] : active) {
      if (auto it = forward.find(leaf); it != forward.end()) backward[it->second] = track;
    }
    std::map<NodeId, std::size_t> next;
    for (NodeId leaf : series[t + 1].leaves()) {
      if (auto it = backward.find(leaf); it != backward.end()) {
        out.tracks[it->second].leaves.push_back(leaf);
        next[leaf] = it->second;
      } else {
        next[leaf] = out.tracks.size();
        out.tracks.push_back({static_cast<int>(out.tracks.size()), static_cast<int>(t + 1), {leaf}});
      }
    }
    active = std::move(next);
  }
  return out;
}

}  // namespace branchmap
