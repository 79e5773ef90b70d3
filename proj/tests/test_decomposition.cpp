#include <gtest/gtest.h>

#include <random>
#include <set>

#include "branchmap/decomposition.hpp"
#include "support/small_trees.hpp"
#include "support/random_trees.hpp"

using namespace branchmap;
using branchmap::testdata::random_merge_tree;

namespace {

std::size_t edge_count(const MergeTree& t, const BranchDecomposition& B) {
  std::size_t e = 0;
  for (const auto& b : B.branches) e += vertex_sequence(t, b).size() - 1;
  return e;
}

std::size_t expected_count(const MergeTree& t) {
  std::size_t c = 1;
  for (NodeId v : t.postorder()) {
    if (v != t.root() && !t.is_leaf(v)) c *= t.children(v).size();
  }
  return c;
}

}  // namespace

TEST(Decomposition, SingleBranchHasOneDecomposition) {
  const auto t = testdata::single_branch(0, 10);
  const auto all = enumerate_branch_decompositions(t);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].main_branch(), (Branch{0, 1}));
  EXPECT_EQ(elder_rule_decomposition(t), all[0]);
}

TEST(Decomposition, FourNodeTreeHasTwo) {
  const auto t = testdata::triple_a();  // 0:root 1:saddle@3 2:leaf@10 3:leaf@6
  const auto all = enumerate_branch_decompositions(t);
  ASSERT_EQ(all.size(), 2u);
  std::set<std::vector<Branch>> got;
  for (const auto& B : all) got.insert(B.sorted());
  EXPECT_TRUE(got.count({{0, 2}, {1, 3}}));
  EXPECT_TRUE(got.count({{0, 3}, {1, 2}}));
}

TEST(Decomposition, ThreeBinaryInnerNodesGiveEight) {
  // root 0 -> 1 -> {2 -> {4,5}, 3 -> {6,7}}
  const MergeTree t({0, 1, 2, 3, 9, 8, 7, 6}, {-1, 0, 1, 1, 2, 2, 3, 3});
  EXPECT_EQ(enumerate_branch_decompositions(t).size(), 8u);
}

TEST(Decomposition, EnumerationCap) {
  std::mt19937_64 rng(3);
  const auto t = random_merge_tree(rng, {.min_leaves = 11, .max_leaves = 11});
  EXPECT_THROW(enumerate_branch_decompositions(t), SizeLimitError);
  EXPECT_NO_THROW(enumerate_branch_decompositions(t, 11));
}

TEST(Decomposition, ElderRuleExamples) {
  EXPECT_EQ(elder_rule_decomposition(testdata::triple_a()).sorted(), (std::vector<Branch>{{0, 2}, {1, 3}}));
  // leaves 11 and 8: the 11 side continues
  EXPECT_EQ(elder_rule_decomposition(testdata::triple_c()).sorted(), (std::vector<Branch>{{0, 2}, {1, 3}}));
}

TEST(Decomposition, ElderTieGoesToSmallerLeafId) {
  const auto t = testdata::twin_peaks();  // leaves 2 and 3 both at 12
  EXPECT_EQ(elder_rule_decomposition(t).main_branch(), (Branch{0, 2}));
  const MergeTree swapped({0, 3, 12, 12}, {-1, 0, 1, 1});
  EXPECT_EQ(elder_rule_decomposition(swapped).main_branch(), (Branch{0, 2}));
}

TEST(Decomposition, CheckReportsProblems) {
  const auto t = testdata::triple_a();
  EXPECT_FALSE(is_decomposition(t, BranchDecomposition{{{0, 2}}, 0}));            // edge missing
  EXPECT_FALSE(is_decomposition(t, BranchDecomposition{{{0, 2}, {0, 3}}, 0}));    // edge twice
  EXPECT_FALSE(is_decomposition(t, BranchDecomposition{{{1, 3}, {0, 2}}, 0}));    // wrong main
  EXPECT_FALSE(is_decomposition(t, BranchDecomposition{{{0, 1}, {1, 2}, {1, 3}}, 0}));  // not a leaf
  EXPECT_TRUE(is_decomposition(t, BranchDecomposition{{{1, 3}, {0, 2}}, 1}));
}

TEST(Decomposition, InducedOnFourNodeTree) {
  const auto t = testdata::triple_a();
  const BranchDecomposition B{{{0, 2}, {1, 3}}, 0};
  const auto ind = induced_decomposition(t, B, 3, 1);
  // cut-off part: saddle 3 -> leaf 6
  ASSERT_EQ(ind.split.inner.size(), 2u);
  ASSERT_EQ(ind.inner.size(), 1u);
  const Branch bi = ind.inner.main_branch();
  EXPECT_EQ(ind.split.inner.value(bi.start), 3.0);
  EXPECT_EQ(ind.split.inner.value(bi.leaf), 6.0);
  // remainder: saddle spliced, root 0 -> leaf 10
  ASSERT_EQ(ind.split.outer.size(), 2u);
  ASSERT_EQ(ind.outer.size(), 1u);
  const Branch bo = ind.outer.main_branch();
  EXPECT_EQ(ind.split.outer.value(bo.start), 0.0);
  EXPECT_EQ(ind.split.outer.value(bo.leaf), 10.0);
  EXPECT_TRUE(is_decomposition(ind.split.inner, ind.inner));
  EXPECT_TRUE(is_decomposition(ind.split.outer, ind.outer));
}

TEST(Decomposition, InducedWholeTree) {
  const auto t = testdata::single_branch(0, 10);
  const auto ind = induced_decomposition(t, elder_rule_decomposition(t), 1, 0);
  EXPECT_EQ(ind.inner.size(), 1u);
  EXPECT_TRUE(ind.split.outer.empty());
  EXPECT_TRUE(ind.outer.empty());
}

TEST(Decomposition, InducedRequiresStartingBranch) {
  const auto t = testdata::triple_a();
  const BranchDecomposition B{{{0, 2}, {1, 3}}, 0};
  EXPECT_THROW(induced_decomposition(t, B, 2, 1), PreconditionError);  // (0,2) passes through
}

TEST(Decomposition, InducedChainResplicesParent) {
  // root 0 -> 1@1 -> {2@9, 3@2 -> {4@8, 5@7}}
  const MergeTree t({0, 1, 9, 2, 8, 7}, {-1, 0, 1, 1, 3, 3});
  const auto B = elder_rule_decomposition(t);  // (0,2), (1,4), (3,5)
  const auto ind = induced_decomposition(t, B, 3, 1);
  EXPECT_TRUE(is_decomposition(ind.split.inner, ind.inner));
  EXPECT_TRUE(is_decomposition(ind.split.outer, ind.outer));
  EXPECT_EQ(ind.split.outer.size(), 2u);  // 0 -> 2 after splicing node 1
  EXPECT_EQ(edge_count(ind.split.inner, ind.inner) + edge_count(ind.split.outer, ind.outer) + 1,
            t.size() - 1);  // the two edges around the spliced node become one
}

TEST(Decomposition, BdtExamples) {
  const auto t = testdata::triple_a();
  const auto bdt = build_bdt(t, BranchDecomposition{{{0, 2}, {1, 3}}, 0});
  EXPECT_EQ(bdt.size(), 2u);
  EXPECT_EQ(bdt.root, 0);
  EXPECT_EQ(bdt.parent[1], 0);
  EXPECT_EQ(bdt.children[0], (std::vector<int>{1}));
  const auto single = build_bdt(testdata::single_branch(0, 1), elder_rule_decomposition(testdata::single_branch(0, 1)));
  EXPECT_EQ(single.size(), 1u);
  EXPECT_EQ(single.edge_count(), 0u);
}

TEST(Decomposition, BdtOfFourLeafTree) {
  // root 0 -> 1@1 -> {2@2 -> {4@10, 5@6}, 3@3 -> {6@9, 7@5}}
  const MergeTree t({0, 1, 2, 3, 10, 6, 9, 5}, {-1, 0, 1, 1, 2, 2, 3, 3});
  const auto B = elder_rule_decomposition(t);
  EXPECT_EQ(B.sorted(), (std::vector<Branch>{{0, 4}, {1, 6}, {2, 5}, {3, 7}}));
  const auto bdt = build_bdt(t, B);
  EXPECT_EQ(bdt.size(), 4u);
  EXPECT_EQ(bdt.edge_count(), 3u);
  auto idx = [&](Branch b) { return static_cast<int>(std::find(B.branches.begin(), B.branches.end(), b) - B.branches.begin()); };
  EXPECT_EQ(bdt.parent[idx({1, 6})], idx({0, 4}));
  EXPECT_EQ(bdt.parent[idx({2, 5})], idx({0, 4}));
  EXPECT_EQ(bdt.parent[idx({3, 7})], idx({1, 6}));
  // children ordered by attachment depth: saddle 1 above saddle 2
  EXPECT_EQ(bdt.children[idx({0, 4})], (std::vector<int>{idx({1, 6}), idx({2, 5})}));
}

TEST(Decomposition, RandomProperties) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 150; ++it) {
    const auto t = random_merge_tree(rng, {.min_leaves = 1, .max_leaves = 6, .max_degree = 3, .integer_values = it % 2 == 0});
    ASSERT_TRUE(validate_merge_tree(t).ok());
    const auto all = enumerate_branch_decompositions(t);
    EXPECT_EQ(all.size(), expected_count(t));
    const auto elder = elder_rule_decomposition(t);
    EXPECT_NE(std::find(all.begin(), all.end(), elder), all.end());
    for (const auto& B : all) {
      ASSERT_TRUE(is_decomposition(t, B));
      EXPECT_EQ(edge_count(t, B), t.size() - 1);
      const auto bdt = build_bdt(t, B);
      EXPECT_EQ(bdt.edge_count(), B.size() - 1);
      // connected: every vertex reaches the root
      for (std::size_t v = 0; v < bdt.size(); ++v) {
        int u = static_cast<int>(v), steps = 0;
        while (bdt.parent[u] >= 0 && steps++ < 100) u = bdt.parent[u];
        EXPECT_EQ(u, bdt.root);
      }
      // induced decompositions for every branch start edge other than the main's
      for (const auto& b : B.branches) {
        if (b.start == t.root()) continue;
        const auto path = vertex_sequence(t, b);
        const auto ind = induced_decomposition(t, B, path[1], b.start);
        ASSERT_TRUE(is_decomposition(ind.split.inner, ind.inner));
        ASSERT_TRUE(is_decomposition(ind.split.outer, ind.outer));
        const bool spliced = t.children(b.start).size() == 2;
        EXPECT_EQ(edge_count(ind.split.inner, ind.inner) + edge_count(ind.split.outer, ind.outer) +
                      (spliced ? 1 : 0),
                  t.size() - 1);
        EXPECT_EQ(ind.inner.size() + ind.outer.size(), B.size());
      }
    }
  }
}
