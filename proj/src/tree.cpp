#include "antforest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace antforest {

std::size_t ForestConfig::resolve_mtry(std::size_t p, Task task) const {
    if (mtry > 0) return mtry;
    std::size_t m = task == Task::kRegression
                        ? p / 3
                        : static_cast<std::size_t>(std::sqrt(static_cast<double>(p)));
    return std::max<std::size_t>(1, std::min(m, p));
}

void ForestConfig::validate(std::size_t p) const {
    if (tree_count < 1) throw std::invalid_argument("ForestConfig: tree_count must be >= 1");
    if (min_node_size < 1) throw std::invalid_argument("ForestConfig: min_node_size must be >= 1");
    if (mtry > p) throw std::invalid_argument("ForestConfig: mtry must be <= feature count");
}

double DecisionTree::predict(std::span<const double> x) const {
    if (x.size() != feature_count)
        throw std::invalid_argument("predict: feature vector has wrong length");
    const TreeNode& leaf = nodes[leaf_index(x)];
    if (task == Task::kRegression) return leaf.leaf[0];
    // Majority class for the scalar entry point.
    return static_cast<double>(
        std::max_element(leaf.leaf.begin(), leaf.leaf.end()) - leaf.leaf.begin());
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> x) const {
    if (task != Task::kClassification)
        throw std::invalid_argument("predict_proba: regression tree");
    if (x.size() != feature_count)
        throw std::invalid_argument("predict_proba: feature vector has wrong length");
    return nodes[leaf_index(x)].leaf;
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = x[static_cast<std::size_t>(n.split_feature)] <= n.split_threshold
                ? static_cast<std::size_t>(n.left)
                : static_cast<std::size_t>(n.right);
    }
    return i;
}

std::size_t DecisionTree::leaf_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes)
        if (n.is_leaf()) ++c;
    return c;
}

namespace {

struct Grower {
    const Dataset& data;
    const ForestConfig& config;
    std::size_t mtry;
    Rng& rng;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> feature_pool;

    Grower(const Dataset& d, const ForestConfig& c, Rng& r)
        : data(d), config(c), mtry(c.resolve_mtry(d.feature_count, d.task)), rng(r) {
        feature_pool.resize(data.feature_count);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    std::vector<double> leaf_payload(std::span<const std::size_t> rows) const {
        if (data.task == Task::kRegression) {
            double sum = 0.0;
            for (std::size_t r : rows) sum += data.targets[r];
            return {sum / static_cast<double>(rows.size())};
        }
        std::vector<double> counts(data.class_count, 0.0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(data.targets[r])] += 1.0;
        for (auto& c : counts) c /= static_cast<double>(rows.size());
        return counts;
    }

    // Node impurity: SSE for regression, size-weighted Gini for classification.
    double node_impurity(std::span<const std::size_t> rows) const {
        const double n = static_cast<double>(rows.size());
        if (data.task == Task::kRegression) {
            double sum = 0.0, sumsq = 0.0;
            for (std::size_t r : rows) {
                const double y = data.targets[r];
                sum += y;
                sumsq += y * y;
            }
            return sumsq - sum * sum / n;
        }
        std::vector<double> counts(data.class_count, 0.0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(data.targets[r])] += 1.0;
        double sq = 0.0;
        for (double c : counts) sq += c * c;
        return n - sq / n;
    }

    bool is_pure(std::span<const std::size_t> rows) const {
        const double first = data.targets[rows[0]];
        for (std::size_t r : rows)
            if (data.targets[r] != first) return false;
        return true;
    }

    struct Split {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double children_impurity = 0.0;
    };

    Split best_split(std::span<const std::size_t> rows) {
        // Fresh mtry draw at every node, without replacement. The chosen
        // subset is scanned in ascending feature order so exact impurity ties
        // resolve to the lowest feature index.
        for (std::size_t i = 0; i < mtry; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, feature_pool.size() - 1);
            std::swap(feature_pool[i], feature_pool[pick(rng)]);
        }
        std::sort(feature_pool.begin(), feature_pool.begin() + static_cast<long>(mtry));

        Split best;
        std::vector<std::pair<double, double>> vals;  // (feature value, target)
        vals.reserve(rows.size());
        std::vector<double> left_counts, right_counts;
        for (std::size_t fi = 0; fi < mtry; ++fi) {
            const std::size_t f = feature_pool[fi];
            vals.clear();
            for (std::size_t r : rows) vals.emplace_back(data.at(r, f), data.targets[r]);
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;  // constant feature

            if (data.task == Task::kRegression) {
                double total_sum = 0.0, total_sumsq = 0.0;
                for (const auto& [v, y] : vals) {
                    total_sum += y;
                    total_sumsq += y * y;
                }
                double lsum = 0.0, lsumsq = 0.0;
                const double n = static_cast<double>(vals.size());
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    lsum += vals[i].second;
                    lsumsq += vals[i].second * vals[i].second;
                    if (vals[i].first == vals[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1), nr = n - nl;
                    const double sse_l = lsumsq - lsum * lsum / nl;
                    const double rsum = total_sum - lsum, rsumsq = total_sumsq - lsumsq;
                    const double sse_r = rsumsq - rsum * rsum / nr;
                    consider(best, f, 0.5 * (vals[i].first + vals[i + 1].first), sse_l + sse_r);
                }
            } else {
                left_counts.assign(data.class_count, 0.0);
                right_counts.assign(data.class_count, 0.0);
                for (const auto& [v, y] : vals) right_counts[static_cast<std::size_t>(y)] += 1.0;
                double left_sq = 0.0;
                double right_sq = 0.0;
                for (double c : right_counts) right_sq += c * c;
                const double n = static_cast<double>(vals.size());
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    const auto cls = static_cast<std::size_t>(vals[i].second);
                    left_sq += 2.0 * left_counts[cls] + 1.0;
                    right_sq += -2.0 * right_counts[cls] + 1.0;
                    left_counts[cls] += 1.0;
                    right_counts[cls] -= 1.0;
                    if (vals[i].first == vals[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1), nr = n - nl;
                    const double gini = (nl - left_sq / nl) + (nr - right_sq / nr);
                    consider(best, f, 0.5 * (vals[i].first + vals[i + 1].first), gini);
                }
            }
        }
        return best;
    }

    static void consider(Split& best, std::size_t feature, double threshold, double impurity) {
        if (!best.found || impurity < best.children_impurity) {
            best.found = true;
            best.feature = feature;
            best.threshold = threshold;
            best.children_impurity = impurity;
        }
    }

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        const int index = static_cast<int>(nodes.size());
        nodes.emplace_back();

        const bool depth_capped = config.max_depth && depth >= *config.max_depth;
        if (rows.size() < config.min_node_size || depth_capped || is_pure(rows)) {
            nodes[static_cast<std::size_t>(index)].leaf = leaf_payload(rows);
            return index;
        }

        const double parent = node_impurity(rows);
        const Split split = best_split(rows);
        const double min_gain = 1e-12 * std::max(1.0, std::abs(parent));
        if (!split.found || parent - split.children_impurity <= min_gain) {
            nodes[static_cast<std::size_t>(index)].leaf = leaf_payload(rows);
            return index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            if (data.at(r, split.feature) <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int left = build(left_rows, depth + 1);
        const int right = build(right_rows, depth + 1);
        TreeNode& node = nodes[static_cast<std::size_t>(index)];
        node.split_feature = static_cast<int>(split.feature);
        node.split_threshold = split.threshold;
        node.left = left;
        node.right = right;
        return index;
    }
};

}  // namespace

DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> row_indices,
                       const ForestConfig& config, Rng& rng) {
    if (row_indices.empty()) throw std::invalid_argument("grow_tree: empty row_indices");
    for (std::size_t r : row_indices)
        if (r >= data.row_count) throw std::invalid_argument("grow_tree: row index out of range");
    config.validate(data.feature_count);

    Grower grower(data, config, rng);
    std::vector<std::size_t> rows(row_indices.begin(), row_indices.end());
    grower.build(rows, 0);

    DecisionTree tree;
    tree.task = data.task;
    tree.feature_count = data.feature_count;
    tree.class_count = data.class_count;
    tree.nodes = std::move(grower.nodes);
    return tree;
}

std::string tree_to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        nlohmann::json j;
        if (n.is_leaf()) {
            j["leaf"] = n.leaf;
        } else {
            j["feature"] = n.split_feature;
            j["threshold"] = n.split_threshold;
            j["left"] = n.left;
            j["right"] = n.right;
        }
        nodes.push_back(std::move(j));
    }
    nlohmann::json root;
    root["task"] = tree.task == Task::kRegression ? "regression" : "classification";
    root["nodes"] = std::move(nodes);
    return root.dump(2);
}

}  // namespace antforest
