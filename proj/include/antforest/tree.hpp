#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antforest/dataset.hpp"
#include "antforest/rng.hpp"

namespace antforest {

struct ForestConfig {
    std::size_t tree_count = 100;
    std::size_t mtry = 0;  // 0 = default: p/3 for regression, sqrt(p) for classification
    std::size_t min_node_size = 1;
    std::optional<std::size_t> max_depth;  // empty = unlimited
    bool bootstrap = true;
    std::uint64_t seed = 0;

    std::size_t resolve_mtry(std::size_t p, Task task) const;
    void validate(std::size_t p) const;
};

struct TreeNode {
    int split_feature = -1;  // -1 marks a leaf
    double split_threshold = 0.0;
    int left = -1;
    int right = -1;
    // Leaf payload: one value for regression, a class-probability vector
    // (summing to 1) for classification.
    std::vector<double> leaf;

    bool is_leaf() const { return split_feature < 0; }
};

struct DecisionTree {
    Task task = Task::kRegression;
    std::size_t feature_count = 0;
    std::size_t class_count = 0;
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const;
    std::vector<double> predict_proba(std::span<const double> x) const;
    // Index of the leaf node x is routed to.
    std::size_t leaf_index(std::span<const double> x) const;
    std::size_t node_count() const { return nodes.size(); }
    std::size_t leaf_count() const;
};

// CART-style recursive growth. Every split is chosen from a fresh uniform
// random subset of mtry features, minimizing SSE (regression) or Gini
// impurity (classification) over midpoints of adjacent distinct values.
// Ties break toward the lowest feature index, then the lowest threshold.
// Recursion stops on pure nodes, node size below min_node_size, the depth
// cap, or when no split reduces impurity.
DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> row_indices,
                       const ForestConfig& config, Rng& rng);

// JSON dump of node records; used for test golden files, not a stable format.
std::string tree_to_json(const DecisionTree& tree);

}  // namespace antforest
