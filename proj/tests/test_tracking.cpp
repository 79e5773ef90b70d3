#include <gtest/gtest.h>

#include "branchmap/tracking.hpp"
#include "support/small_trees.hpp"

using namespace branchmap;

namespace {

// Two peaks at heights 10 and 8 joined at 3.
MergeTree two_peaks() { return MergeTree({0, 3, 10, 8}, {-1, 0, 1, 1}); }

// The 8 peak splits off a new peak of height 6.
MergeTree three_peaks() { return MergeTree({0, 3, 10, 5, 8, 6}, {-1, 0, 1, 1, 3, 3}); }

}  // namespace

TEST(Tracking, ConstantSeriesKeepsEveryTrack) {
  const std::vector<MergeTree> series(4, two_peaks());
  const auto r = track_features(series, DistanceConfig{});
  ASSERT_EQ(r.steps.size(), 3u);
  ASSERT_EQ(r.tracks.size(), 2u);
  for (const auto& s : r.steps) EXPECT_EQ(s.distance, 0.0);
  for (const auto& t : r.tracks) {
    EXPECT_EQ(t.first_step, 0);
    EXPECT_EQ(t.last_step(), 3);
    EXPECT_EQ(t.leaves, std::vector<NodeId>(4, t.leaves.front()));
  }
}

TEST(Tracking, NewPeakStartsATrack) {
  const std::vector<MergeTree> series = {two_peaks(), three_peaks(), three_peaks()};
  const auto r = track_features(series, DistanceConfig{});
  ASSERT_EQ(r.tracks.size(), 3u);
  int born = 0;
  for (const auto& t : r.tracks) {
    if (t.first_step == 1) {
      ++born;
      EXPECT_EQ(series[1].value(t.leaves.front()), 6.0);
    }
    EXPECT_EQ(t.last_step(), 2);
  }
  EXPECT_EQ(born, 1);
}

TEST(Tracking, VanishingPeakEndsItsTrack) {
  const std::vector<MergeTree> series = {three_peaks(), two_peaks()};
  const auto r = track_features(series, DistanceConfig{});
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.steps[0].leaf_pairs.size(), 2u);
  int ended = 0;
  for (const auto& t : r.tracks) ended += t.last_step() == 0;
  EXPECT_EQ(ended, 1);
}

TEST(Tracking, Preconditions) {
  EXPECT_THROW(track_features({two_peaks()}, DistanceConfig{}), PreconditionError);
  DistanceConfig cfg;
  cfg.kind = DistanceKind::kOneDegree;
  EXPECT_THROW(track_features({two_peaks(), two_peaks()}, cfg), PreconditionError);
  cfg.kind = DistanceKind::kBranchFixed;
  EXPECT_EQ(track_features({two_peaks(), three_peaks()}, cfg).steps.size(), 1u);
}
