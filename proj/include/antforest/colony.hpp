#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "antforest/data_io.hpp"
#include "antforest/rng.hpp"

namespace antforest {

// Conjugate normal-normal belief over the K site qualities, one ant.
// Observation noise is treated as known; zero observations leave a site at
// the prior.
class AntPosterior {
public:
    AntPosterior() = default;
    AntPosterior(std::size_t site_count, double prior_mean, double prior_precision,
                 double obs_noise_sd);

    void observe(std::size_t site, double value);

    double mean(std::size_t site) const;
    double variance(std::size_t site) const;
    std::size_t observation_count(std::size_t site) const { return obs_count_[site]; }
    std::size_t site_count() const { return obs_count_.size(); }
    double prior_mean() const { return prior_mean_; }
    double prior_precision() const { return prior_precision_; }

    std::vector<double> means() const;
    // Argmax of posterior means, ties to the lowest index.
    std::size_t preferred_site() const;

private:
    double prior_mean_ = 0.0;
    double prior_precision_ = 1.0;
    double obs_noise_sd_ = 1.0;
    std::vector<double> obs_sum_;
    std::vector<std::size_t> obs_count_;
};

// Functional form of the conjugate update.
AntPosterior posterior_update(const AntPosterior& post, std::size_t site, double observation);

// One posterior draw per site, argmax; ties to the lowest index.
std::size_t thompson_select(const AntPosterior& post, Rng& rng);

struct ColonyConfig {
    std::size_t ant_count = 100;
    std::size_t site_count = 20;
    std::size_t steps = 50;
    double p_explore = 0.3;       // probability of an independent uniform site visit
    double recruit_scale = 1.0;   // alpha in r_i = alpha * posterior mean
    std::optional<double> quorum; // recruitment units; empty = stopping rule off
    double pheromone_evaporation = 0.1;
    double obs_noise_sd = 1.0;    // used when the harness builds the world
    double quality_gap = 1.0;     // used when the harness builds the world
    double prior_mean = 0.0;
    double prior_precision = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ColonyState {
    std::vector<AntPosterior> ants;
    std::vector<double> pheromone;       // per site
    std::vector<std::size_t> committed;  // per ant, last Thompson selection
};

struct ColonyStepRow {
    std::vector<double> recruitment;      // R_j(t)
    std::vector<double> colony_estimate;  // normalized recruitment, zeros when R == 0
    double emergence = 0.0;
    double alignment = 0.0;
};

struct ColonyTrace {
    std::vector<std::vector<double>> recruitment;
    std::vector<std::vector<double>> colony_estimate;
    std::vector<double> emergence;
    std::vector<double> alignment;
    // Final posterior means, ant by site.
    std::vector<std::vector<double>> preference_matrix;
    // (site, step) when the quorum rule fired.
    std::optional<std::pair<std::size_t, std::size_t>> decision;

    std::size_t step_count() const { return emergence.size(); }
};

ColonyState init_colony(const SiteWorld& world, const ColonyConfig& config);

// One synchronous step: every ant visits a site (uniform with probability
// p_explore, otherwise pheromone-proportional with a uniform fallback),
// records a noisy observation, updates its posterior, Thompson-commits and
// recruits at alpha * max(0, posterior mean). Pheromone then evaporates and
// gains each ant's recruitment on its committed site.
ColonyStepRow step_colony(ColonyState& state, const SiteWorld& world,
                          const ColonyConfig& config, Rng& rng);

// Runs `steps` steps, stopping early when the quorum fires. Deterministic
// given (world, config, seed).
ColonyTrace run_colony(const SiteWorld& world, const ColonyConfig& config);

// E(t) = 1 - H(colony estimate) / ln K; zero whenever recruitment is zero.
std::vector<double> emergence_curve(const ColonyTrace& trace, std::size_t site_count);
double emergence_value(const std::vector<double>& estimate, double total_recruitment);

struct PairwiseCorrelation {
    double rho = 0.0;
    std::size_t pairs = 0;
    std::size_t excluded_rows = 0;  // constant vectors, Pearson undefined
};

// Mean Pearson correlation over all unordered row pairs; zero-variance rows
// are excluded. Throws DegenerateEstimateError with fewer than 2 usable rows.
PairwiseCorrelation mean_pairwise_correlation(const std::vector<std::vector<double>>& rows);

double within_colony_correlation(const std::vector<std::vector<double>>& preference_matrix);

}  // namespace antforest
