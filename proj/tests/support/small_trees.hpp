#pragma once

#include "branchmap/merge_tree.hpp"

namespace branchmap::testdata {

// Three four-node trees: root 0, one saddle, two leaves.
inline MergeTree triple_a() { return MergeTree({0, 3, 10, 6}, {-1, 0, 1, 1}); }
inline MergeTree triple_b() { return MergeTree({0, 5, 10, 8}, {-1, 0, 1, 1}); }
inline MergeTree triple_c() { return MergeTree({0, 6, 11, 8}, {-1, 0, 1, 1}); }

// Two saddles stacked on one side versus a single saddle.
inline MergeTree stacked_saddles() { return MergeTree({0, 3, 12, 9, 12, 11}, {-1, 0, 1, 1, 3, 3}); }
inline MergeTree twin_peaks() { return MergeTree({0, 3, 12, 12}, {-1, 0, 1, 1}); }

inline MergeTree single_branch(double low, double high) { return MergeTree({low, high}, {-1, 0}); }

}  // namespace branchmap::testdata
