#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antforest/colony.hpp"
#include "antforest/data_io.hpp"
#include "antforest/forest.hpp"
#include "antforest/stats.hpp"

namespace antforest {

// One (sigma^2, rho, M) measurement with both sides of the identity
// Var[mean] = rho sigma^2 + (1 - rho) sigma^2 / M.
struct DecompositionRecord {
    double unit_variance = 0.0;
    double pairwise_correlation = 0.0;
    std::size_t ensemble_size = 1;
    double theoretical_variance = 0.0;
    double empirical_variance = 0.0;
};

// rho sigma^2 + (1 - rho) sigma^2 / m.
double theoretical_ensemble_variance(double sigma2, double rho, std::size_t m);

DecompositionRecord make_decomposition_record(double sigma2, double rho, std::size_t m,
                                              double empirical_variance);

// bias^2 + rho sigma^2 + (1 - rho) sigma^2 / m + noise. An empty m takes the
// M -> infinity limit (the 1/M term drops).
double generalization_error_decomposition(double bias2, double sigma2, double rho,
                                          std::optional<std::size_t> m, double noise);

struct CorrelationBound {
    double rho_max = 0.0;
    double theta = 0.0;
    double bound = 0.0;  // rho_max * (1 - theta)
};

CorrelationBound make_correlation_bound(double rho_max, double theta);

struct BoundCheck {
    bool pass = false;
    double bound = 0.0;
    double margin = 0.0;  // bound + slack - observed
};

BoundCheck correlation_bound_check(double rho_observed, double rho_max, double theta,
                                   double slack);

// Monte Carlo verification of the closed-form ensemble variance on
// equicorrelated Gaussian units (shared-factor construction).
struct VarianceOracleResult {
    double empirical_variance = 0.0;
    double theoretical_variance = 0.0;
    double relative_error = 0.0;
};

VarianceOracleResult variance_decomposition_oracle(double sigma2, double rho, std::size_t m,
                                                   std::size_t draws, std::uint64_t seed);

// Statistics extracted from per-unit prediction tensors.
// predictions[r][b][t]: replicate r, unit b, test point t. Correlation pairs
// units within the same replicate and correlates across test points;
// constant prediction vectors are excluded and counted.
struct EnsembleStats {
    double rho = 0.0;
    std::size_t ensemble_size = 1;
    std::size_t degenerate_units = 0;
    std::size_t degenerate_replicates = 0;
    std::vector<double> sigma2;           // per test point, across all units and replicates
    std::vector<double> empirical_var;    // per test point, across replicate ensemble means
    std::vector<double> theoretical_var;  // per test point, from (rho, sigma2, M)

    double mean_sigma2() const;
    double mean_empirical_var() const;
    double mean_theoretical_var() const;
};

EnsembleStats ensemble_prediction_stats(
    const std::vector<std::vector<std::vector<double>>>& predictions);

// Trains nothing: evaluates already-trained replicate forests at the given
// test points and defers to ensemble_prediction_stats.
EnsembleStats empirical_tree_stats(const std::vector<Forest>& forests,
                                   const std::vector<std::vector<double>>& test_points);

// ---- theta sweeps -------------------------------------------------------
// Both systems emit identically-schemaed tables; downstream code cannot
// tell the source apart.

struct SweepRow {
    std::string system;
    double theta = 0.0;
    std::size_t replicate = 0;
    double rho = 0.0;
    double sigma2 = 0.0;
    double empirical_var = 0.0;
    double theoretical_var = 0.0;
};

struct SweepCell {
    std::string system;
    double theta = 0.0;
    MeanCi rho_ci;
    std::vector<SweepRow> rows;
};

struct SweepResult {
    std::vector<SweepCell> cells;

    // Replicate-level (theta, rho) regression across all cells.
    OlsFit rho_trend() const;
    double delta_rho() const;  // max - min of cell mean rho
};

// theta = 1 - mtry/p: each cell overrides mtry = round(p * (1 - theta)),
// trains `replicates` forests on fresh synthetic data and measures
// within-forest tree correlation at shared test points.
struct ForestSweepSpec {
    SyntheticSpec data_spec;  // seed field ignored; per-replicate seeds derived
    ForestConfig forest;      // mtry overridden per cell
    std::size_t test_point_count = 50;
};

// theta = p_explore: each cell runs `replicates` colonies on fresh site
// worlds and measures within-colony preference correlation.
struct ColonySweepSpec {
    ColonyConfig colony;  // p_explore and seed overridden per cell/replicate
};

SweepResult theta_sweep(const ForestSweepSpec& spec, std::span<const double> grid,
                        std::size_t replicates, std::uint64_t master_seed);
SweepResult theta_sweep(const ColonySweepSpec& spec, std::span<const double> grid,
                        std::size_t replicates, std::uint64_t master_seed);

}  // namespace antforest
