#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace antforest {

enum class Task { kRegression, kClassification };

// Row-major feature matrix plus a target column. For classification the
// targets are contiguous label ids starting at 0; `labels` maps id -> name
// in first-appearance order when the data came from a labeled file.
struct Dataset {
    Task task = Task::kRegression;
    std::size_t row_count = 0;
    std::size_t feature_count = 0;
    std::vector<double> features;  // row_count * feature_count, row-major
    std::vector<double> targets;   // length row_count; label ids for classification
    std::size_t class_count = 0;   // classification only
    std::vector<std::string> labels;

    double at(std::size_t row, std::size_t col) const {
        return features[row * feature_count + col];
    }
    std::span<const double> row(std::size_t r) const {
        return {features.data() + r * feature_count, feature_count};
    }

    // Throws std::invalid_argument when shapes or label ids are inconsistent.
    void validate() const;
};

}  // namespace antforest
