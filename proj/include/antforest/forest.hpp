#pragma once

#include <span>
#include <vector>

#include "antforest/tree.hpp"

namespace antforest {

struct Forest {
    Task task = Task::kRegression;
    std::size_t feature_count = 0;
    std::size_t class_count = 0;
    ForestConfig config;
    std::vector<DecisionTree> trees;
    // Row indices drawn for each tree; length n per tree. Kept for OOB
    // estimation and reproducibility checks.
    std::vector<std::vector<std::size_t>> bootstrap_rows;

    std::size_t tree_count() const { return trees.size(); }
};

// Grows config.tree_count trees, each on an independent with-replacement
// sample of n rows (or the identity rows when config.bootstrap is false).
// Per-tree RNG streams are derived from config.seed and the tree index, so
// results are identical for any worker count.
Forest train_forest(const Dataset& data, const ForestConfig& config);

// Arithmetic mean of per-tree predictions (regression).
double predict_forest(const Forest& forest, std::span<const double> x);

// Mean of per-tree leaf class distributions (classification).
std::vector<double> predict_forest_proba(const Forest& forest, std::span<const double> x);

// Argmax of the averaged distribution; ties go to the lowest class id.
std::size_t predict_forest_class(const Forest& forest, std::span<const double> x);

struct OobResult {
    double error = 0.0;        // MSE (regression) or misclassification rate
    std::size_t evaluated_rows = 0;
    std::size_t skipped_rows = 0;  // rows in every tree's bootstrap sample
};

// Throws DegenerateEstimateError when every row was in-bag for every tree.
OobResult oob_error(const Forest& forest, const Dataset& data);

}  // namespace antforest
