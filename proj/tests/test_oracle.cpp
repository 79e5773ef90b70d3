#include <gtest/gtest.h>

#include <random>

#include "branchmap/oracle.hpp"
#include "support/small_trees.hpp"
#include "support/random_trees.hpp"

using namespace branchmap;
using branchmap::testdata::random_merge_tree;

namespace {

const BaseMetric kL1{MetricKind::kBirthPersistenceL1};

// Every upward-closed, main-anchored pairing of two decomposition trees,
// checked against the full rule set by the validator. Tiny inputs only.
double global_brute_force(const MergeTree& t1, const MergeTree& t2, const BaseMetric& metric,
                          Aggregation mode) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& B1 : enumerate_branch_decompositions(t1)) {
    for (const auto& B2 : enumerate_branch_decompositions(t2)) {
      std::vector<int> partner(B1.size(), -1);
      std::vector<char> used(B2.size(), 0);
      partner[B1.main] = static_cast<int>(B2.main);
      used[B2.main] = 1;
      auto rec = [&](auto&& self, std::size_t a) -> void {
        if (a == B1.size()) {
          BranchMapping m;
          m.metric = metric.kind;
          m.mode = mode;
          m.first = B1;
          m.second = B2;
          std::vector<double> costs;
          auto l1 = [&](const Branch& b) { return BranchLabel{t1.value(b.start), t1.value(b.leaf)}; };
          auto l2 = [&](const Branch& b) { return BranchLabel{t2.value(b.start), t2.value(b.leaf)}; };
          for (std::size_t i = 0; i < B1.size(); ++i) {
            if (partner[i] >= 0) {
              const double c = metric.match(l1(B1.branches[i]), l2(B2.branches[partner[i]]));
              m.pairs.push_back({B1.branches[i], B2.branches[partner[i]], c});
              costs.push_back(c);
            } else {
              const double c = metric.deletion(l1(B1.branches[i]));
              m.deletions.push_back({B1.branches[i], c});
              costs.push_back(c);
            }
          }
          for (std::size_t j = 0; j < B2.size(); ++j) {
            if (!used[j]) {
              const double c = metric.deletion(l2(B2.branches[j]));
              m.insertions.push_back({B2.branches[j], c});
              costs.push_back(c);
            }
          }
          m.total_cost = aggregate(costs, mode);
          if (validate_branch_mapping(t1, t2, m).ok()) best = std::min(best, m.total_cost);
          return;
        }
        if (a == B1.main) return self(self, a + 1);
        partner[a] = -1;
        self(self, a + 1);
        for (std::size_t j = 0; j < B2.size(); ++j) {
          if (used[j]) continue;
          used[j] = 1;
          partner[a] = static_cast<int>(j);
          self(self, a + 1);
          used[j] = 0;
          partner[a] = -1;
        }
      };
      rec(rec, 0);
    }
  }
  return best;
}

}  // namespace

TEST(Oracle, FourNodeTriple) {
  EXPECT_NEAR(oracle_distance(testdata::triple_a(), testdata::triple_c(), kL1, Aggregation::kSum).distance, 5.0, 1e-12);
  EXPECT_NEAR(oracle_distance(testdata::triple_a(), testdata::triple_b(), kL1, Aggregation::kSum).distance, 2.0, 1e-12);
}

TEST(Oracle, SelfDistanceIsZero) {
  const auto t = testdata::stacked_saddles();
  EXPECT_EQ(oracle_distance(t, t, kL1, Aggregation::kSum).distance, 0.0);
}

TEST(Oracle, SizeCap) {
  std::mt19937_64 rng(1);
  const auto big = random_merge_tree(rng, {.min_leaves = 8, .max_leaves = 8});
  EXPECT_THROW(oracle_distance(big, testdata::triple_a(), kL1, Aggregation::kSum), SizeLimitError);
}

TEST(Oracle, EmptySide) {
  const auto r = oracle_distance(testdata::triple_a(), MergeTree{}, BaseMetric{MetricKind::kPersistenceDiff},
                                 Aggregation::kSum);
  EXPECT_NEAR(r.distance, 13.0, 1e-12);
  EXPECT_TRUE(validate_branch_mapping(testdata::triple_a(), MergeTree{}, r.mapping).ok());
}

// The oracle only checks attachment order between siblings; on tiny trees
// that must agree with checking every pair of pairs.
TEST(Oracle, LocalOrderCheckMatchesGlobalRules) {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 80; ++it) {
    const testdata::RandomTreeOptions opt{.max_leaves = 4, .max_degree = 3, .integer_values = it % 3 == 0};
    const auto t1 = random_merge_tree(rng, opt), t2 = random_merge_tree(rng, opt);
    const auto mode = it % 2 ? Aggregation::kSum : Aggregation::kRootOfSquaredSum;
    const auto o = oracle_distance(t1, t2, kL1, mode);
    EXPECT_NEAR(o.distance, global_brute_force(t1, t2, kL1, mode), 1e-9);
    EXPECT_TRUE(validate_branch_mapping(t1, t2, o.mapping).ok());
  }
}

TEST(Oracle, AgreesWithDynamicProgram) {
  std::mt19937_64 rng(31);
  const MetricKind kinds[] = {MetricKind::kPersistenceDiff, MetricKind::kBirthPersistenceL1,
                              MetricKind::kEuclideanBD, MetricKind::kLInfinityBD};
  for (int it = 0; it < 60; ++it) {
    const testdata::RandomTreeOptions opt{.max_leaves = 5, .max_degree = 2 + it % 2, .integer_values = it % 5 == 0};
    const auto t1 = random_merge_tree(rng, opt), t2 = random_merge_tree(rng, opt);
    for (auto k : kinds) {
      for (auto mode : {Aggregation::kSum, Aggregation::kRootOfSquaredSum}) {
        const BaseMetric metric{k};
        EXPECT_NEAR(branch_mapping_distance(t1, t2, metric, mode).distance,
                    oracle_distance(t1, t2, metric, mode).distance, 1e-9)
            << "iteration " << it << " metric " << metric_name(k);
      }
    }
  }
}
