#pragma once

#include "branchmap/assignment.hpp"
#include "branchmap/baselines.hpp"
#include "branchmap/branch_mapping.hpp"
#include "branchmap/decomposition.hpp"
#include "branchmap/distance.hpp"
#include "branchmap/error.hpp"
#include "branchmap/generators.hpp"
#include "branchmap/io.hpp"
#include "branchmap/matrix.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/metric.hpp"
#include "branchmap/oracle.hpp"
#include "branchmap/scalar_field.hpp"
#include "branchmap/simplify.hpp"
#include "branchmap/tracking.hpp"
