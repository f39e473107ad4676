#include "antforest/forest.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "antforest/errors.hpp"
#include "antforest/parallel.hpp"

namespace antforest {

Forest train_forest(const Dataset& data, const ForestConfig& config) {
    data.validate();
    config.validate(data.feature_count);

    Forest forest;
    forest.task = data.task;
    forest.feature_count = data.feature_count;
    forest.class_count = data.class_count;
    forest.config = config;
    forest.trees.resize(config.tree_count);
    forest.bootstrap_rows.resize(config.tree_count);

    const std::size_t n = data.row_count;
    parallel_for(config.tree_count, [&](std::size_t b) {
        Rng rng = make_rng(derive_seed(config.seed, b));
        std::vector<std::size_t> rows(n);
        if (config.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& r : rows) r = pick(rng);
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        forest.trees[b] = grow_tree(data, rows, config, rng);
        forest.bootstrap_rows[b] = std::move(rows);
    });
    return forest;
}

double predict_forest(const Forest& forest, std::span<const double> x) {
    if (forest.trees.empty()) throw std::invalid_argument("predict_forest: empty forest");
    if (x.size() != forest.feature_count)
        throw std::invalid_argument("predict_forest: feature vector has wrong length");
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += tree.predict(x);
    return sum / static_cast<double>(forest.trees.size());
}

std::vector<double> predict_forest_proba(const Forest& forest, std::span<const double> x) {
    if (forest.task != Task::kClassification)
        throw std::invalid_argument("predict_forest_proba: regression forest");
    if (x.size() != forest.feature_count)
        throw std::invalid_argument("predict_forest_proba: feature vector has wrong length");
    std::vector<double> probs(forest.class_count, 0.0);
    for (const auto& tree : forest.trees) {
        const auto p = tree.predict_proba(x);
        for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += p[c];
    }
    for (auto& p : probs) p /= static_cast<double>(forest.trees.size());
    return probs;
}

std::size_t predict_forest_class(const Forest& forest, std::span<const double> x) {
    const auto probs = predict_forest_proba(forest, x);
    return static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
}

OobResult oob_error(const Forest& forest, const Dataset& data) {
    if (forest.bootstrap_rows.size() != forest.trees.size())
        throw std::invalid_argument("oob_error: forest has no bootstrap record");

    const std::size_t n = data.row_count;
    std::vector<std::vector<char>> in_bag(forest.trees.size(), std::vector<char>(n, 0));
    for (std::size_t b = 0; b < forest.trees.size(); ++b)
        for (std::size_t r : forest.bootstrap_rows[b]) in_bag[b][r] = 1;

    OobResult result;
    double loss_sum = 0.0;
    std::vector<double> probs;
    for (std::size_t r = 0; r < n; ++r) {
        const auto x = data.row(r);
        std::size_t used = 0;
        if (data.task == Task::kRegression) {
            double sum = 0.0;
            for (std::size_t b = 0; b < forest.trees.size(); ++b) {
                if (in_bag[b][r]) continue;
                sum += forest.trees[b].predict(x);
                ++used;
            }
            if (used == 0) {
                ++result.skipped_rows;
                continue;
            }
            const double err = sum / static_cast<double>(used) - data.targets[r];
            loss_sum += err * err;
        } else {
            probs.assign(forest.class_count, 0.0);
            for (std::size_t b = 0; b < forest.trees.size(); ++b) {
                if (in_bag[b][r]) continue;
                const auto p = forest.trees[b].predict_proba(x);
                for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += p[c];
                ++used;
            }
            if (used == 0) {
                ++result.skipped_rows;
                continue;
            }
            const auto cls = static_cast<std::size_t>(
                std::max_element(probs.begin(), probs.end()) - probs.begin());
            if (cls != static_cast<std::size_t>(data.targets[r])) loss_sum += 1.0;
        }
        ++result.evaluated_rows;
    }
    if (result.evaluated_rows == 0)
        throw DegenerateEstimateError("oob_error: every row was in-bag for every tree");
    result.error = loss_sum / static_cast<double>(result.evaluated_rows);
    return result;
}

}  // namespace antforest
