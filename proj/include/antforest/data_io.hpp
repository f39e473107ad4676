#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "antforest/dataset.hpp"

namespace antforest {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadOptions {
    bool has_header = false;
    Task task = Task::kRegression;
};

// CSV with the target in the last column. Classification targets may be
// arbitrary strings; they are re-indexed to 0..C-1 in first-appearance order
// and the mapping is kept in Dataset::labels. Ragged rows, non-numeric
// features and empty files raise ParseError naming the offending line.
Dataset load_dataset(const std::string& path, const LoadOptions& options);

// Writes the same layout back (12 significant digits); load(save(d)) == d.
void save_dataset(const Dataset& data, const std::string& path, bool header = false);

// True nest-site qualities for the colony simulator. Qualities are an
// equally spaced ladder 0, gap, ..., (K-1)*gap, randomly permuted, so the
// best site index varies per seed while the quality multiset stays fixed.
struct SiteWorld {
    std::vector<double> qualities;
    double obs_noise_sd = 1.0;
    std::size_t best_site = 0;

    std::size_t site_count() const { return qualities.size(); }
    void validate() const;
};

enum class SyntheticKind {
    kFriedmanRegression,       // y = 10 sin(pi x1 x2) + 20 (x3-.5)^2 + 10 x4 + 5 x5 + noise
    kLinearSeparable,          // binary labels from a random hyperplane, flipped with p = noise
    kCorrelatedGaussianUnits,  // M equicorrelated unit columns, target = shared factor
    kSiteWorld,
};

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::kFriedmanRegression;
    std::size_t n = 0;          // rows (or draws for unit kind)
    std::size_t p = 0;          // features (or unit count M)
    std::size_t site_count = 0; // site-world only
    double noise = 0.0;         // sd for regression; label-flip prob for classification
    double rho = 0.0;           // correlated-units only
    double sigma2 = 1.0;        // correlated-units only
    double quality_gap = 1.0;   // site-world only
    std::uint64_t seed = 0;

    void validate() const;
};

Dataset generate_dataset(const SyntheticSpec& spec);
SiteWorld generate_site_world(const SyntheticSpec& spec);

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string synthetic_kind_name(SyntheticKind kind);

}  // namespace antforest
