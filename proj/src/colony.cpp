#include "antforest/colony.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "antforest/errors.hpp"
#include "antforest/stats.hpp"

namespace antforest {

AntPosterior::AntPosterior(std::size_t site_count, double prior_mean, double prior_precision,
                           double obs_noise_sd)
    : prior_mean_(prior_mean),
      prior_precision_(prior_precision),
      obs_noise_sd_(obs_noise_sd),
      obs_sum_(site_count, 0.0),
      obs_count_(site_count, 0) {
    if (prior_precision < 0) throw std::invalid_argument("AntPosterior: negative precision");
    if (obs_noise_sd < 0) throw std::invalid_argument("AntPosterior: negative noise sd");
}

void AntPosterior::observe(std::size_t site, double value) {
    if (site >= obs_sum_.size()) throw std::invalid_argument("observe: site out of range");
    obs_sum_[site] += value;
    obs_count_[site] += 1;
}

double AntPosterior::mean(std::size_t site) const {
    const std::size_t n = obs_count_[site];
    if (n == 0) return prior_mean_;
    if (obs_noise_sd_ == 0.0) return obs_sum_[site] / static_cast<double>(n);
    const double data_precision = static_cast<double>(n) / (obs_noise_sd_ * obs_noise_sd_);
    const double total = prior_precision_ + data_precision;
    if (total == 0.0) return prior_mean_;
    return (prior_precision_ * prior_mean_ +
            obs_sum_[site] / (obs_noise_sd_ * obs_noise_sd_)) /
           total;
}

double AntPosterior::variance(std::size_t site) const {
    const std::size_t n = obs_count_[site];
    if (obs_noise_sd_ == 0.0 && n > 0) return 0.0;
    const double data_precision =
        obs_noise_sd_ == 0.0 ? 0.0
                             : static_cast<double>(n) / (obs_noise_sd_ * obs_noise_sd_);
    const double total = prior_precision_ + data_precision;
    if (total == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / total;
}

std::vector<double> AntPosterior::means() const {
    std::vector<double> m(obs_count_.size());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = mean(j);
    return m;
}

std::size_t AntPosterior::preferred_site() const {
    std::size_t best = 0;
    double best_mean = mean(0);
    for (std::size_t j = 1; j < obs_count_.size(); ++j) {
        const double m = mean(j);
        if (m > best_mean) {
            best = j;
            best_mean = m;
        }
    }
    return best;
}

AntPosterior posterior_update(const AntPosterior& post, std::size_t site, double observation) {
    AntPosterior next = post;
    next.observe(site, observation);
    return next;
}

std::size_t thompson_select(const AntPosterior& post, Rng& rng) {
    std::size_t best = 0;
    double best_sample = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < post.site_count(); ++j) {
        const double sd = std::sqrt(post.variance(j));
        double sample = post.mean(j);
        if (sd > 0.0) {
            std::normal_distribution<double> dist(post.mean(j), sd);
            sample = dist(rng);
        }
        if (sample > best_sample) {
            best_sample = sample;
            best = j;
        }
    }
    return best;
}

void ColonyConfig::validate() const {
    if (ant_count < 1) throw std::invalid_argument("ColonyConfig: ant_count must be >= 1");
    if (site_count < 1) throw std::invalid_argument("ColonyConfig: site_count must be >= 1");
    if (p_explore < 0 || p_explore > 1)
        throw std::invalid_argument("ColonyConfig: p_explore must be in [0, 1]");
    if (recruit_scale < 0) throw std::invalid_argument("ColonyConfig: negative recruit_scale");
    if (pheromone_evaporation < 0 || pheromone_evaporation > 1)
        throw std::invalid_argument("ColonyConfig: evaporation must be in [0, 1]");
    if (quorum && *quorum <= 0) throw std::invalid_argument("ColonyConfig: quorum must be > 0");
    if (obs_noise_sd < 0) throw std::invalid_argument("ColonyConfig: negative obs_noise_sd");
    if (prior_precision <= 0)
        throw std::invalid_argument("ColonyConfig: prior_precision must be > 0");
}

ColonyState init_colony(const SiteWorld& world, const ColonyConfig& config) {
    config.validate();
    world.validate();
    ColonyState state;
    state.ants.assign(config.ant_count,
                      AntPosterior(world.site_count(), config.prior_mean,
                                   config.prior_precision, world.obs_noise_sd));
    state.pheromone.assign(world.site_count(), 0.0);
    state.committed.assign(config.ant_count, 0);
    return state;
}

namespace {

std::size_t sample_weighted(const std::vector<double>& weights, double total, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, total);
    const double u = unit(rng);
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        if (u < acc) return j;
    }
    return weights.size() - 1;
}

}  // namespace

double emergence_value(const std::vector<double>& estimate, double total_recruitment) {
    if (total_recruitment <= 0.0) return 0.0;
    if (estimate.size() <= 1) return 1.0;
    double entropy = 0.0;
    for (double p : estimate)
        if (p > 0.0) entropy -= p * std::log(p);
    return 1.0 - entropy / std::log(static_cast<double>(estimate.size()));
}

ColonyStepRow step_colony(ColonyState& state, const SiteWorld& world,
                          const ColonyConfig& config, Rng& rng) {
    const std::size_t sites = world.site_count();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> uniform_site(0, sites - 1);
    std::normal_distribution<double> noise(0.0, world.obs_noise_sd);

    const double pheromone_total =
        std::accumulate(state.pheromone.begin(), state.pheromone.end(), 0.0);

    ColonyStepRow row;
    row.recruitment.assign(sites, 0.0);

    std::size_t aligned = 0;
    for (std::size_t i = 0; i < state.ants.size(); ++i) {
        AntPosterior& ant = state.ants[i];
        std::size_t visited;
        if (unit(rng) < config.p_explore || pheromone_total <= 0.0)
            visited = uniform_site(rng);
        else
            visited = sample_weighted(state.pheromone, pheromone_total, rng);

        const double observation =
            world.qualities[visited] + (world.obs_noise_sd > 0 ? noise(rng) : 0.0);
        ant.observe(visited, observation);

        const std::size_t committed = thompson_select(ant, rng);
        state.committed[i] = committed;
        row.recruitment[committed] +=
            config.recruit_scale * std::max(0.0, ant.mean(committed));

        if (ant.preferred_site() == world.best_site) ++aligned;
    }

    const double total =
        std::accumulate(row.recruitment.begin(), row.recruitment.end(), 0.0);
    row.colony_estimate.assign(sites, 0.0);
    if (total > 0.0)
        for (std::size_t j = 0; j < sites; ++j)
            row.colony_estimate[j] = row.recruitment[j] / total;
    row.emergence = emergence_value(row.colony_estimate, total);
    row.alignment = static_cast<double>(aligned) / static_cast<double>(state.ants.size());

    // Synchronized pheromone phase: this step's site choices used the field
    // as it stood at the start of the step.
    for (std::size_t j = 0; j < sites; ++j) {
        state.pheromone[j] *= 1.0 - config.pheromone_evaporation;
        state.pheromone[j] += row.recruitment[j];
    }
    return row;
}

ColonyTrace run_colony(const SiteWorld& world, const ColonyConfig& config) {
    ColonyState state = init_colony(world, config);
    Rng rng = make_rng(config.seed);

    ColonyTrace trace;
    for (std::size_t t = 0; t < config.steps; ++t) {
        ColonyStepRow row = step_colony(state, world, config, rng);
        const double max_r = row.recruitment.empty()
                                 ? 0.0
                                 : *std::max_element(row.recruitment.begin(),
                                                     row.recruitment.end());
        trace.recruitment.push_back(std::move(row.recruitment));
        trace.colony_estimate.push_back(std::move(row.colony_estimate));
        trace.emergence.push_back(row.emergence);
        trace.alignment.push_back(row.alignment);

        if (config.quorum && max_r >= *config.quorum) {
            const auto& rec = trace.recruitment.back();
            const std::size_t site = static_cast<std::size_t>(
                std::max_element(rec.begin(), rec.end()) - rec.begin());
            trace.decision = {site, t};
            break;
        }
    }

    trace.preference_matrix.reserve(state.ants.size());
    for (const auto& ant : state.ants) trace.preference_matrix.push_back(ant.means());
    return trace;
}

std::vector<double> emergence_curve(const ColonyTrace& trace, std::size_t site_count) {
    std::vector<double> curve;
    curve.reserve(trace.step_count());
    for (std::size_t t = 0; t < trace.step_count(); ++t) {
        const double total = std::accumulate(trace.recruitment[t].begin(),
                                             trace.recruitment[t].end(), 0.0);
        std::vector<double> estimate = trace.colony_estimate[t];
        estimate.resize(site_count, 0.0);
        curve.push_back(emergence_value(estimate, total));
    }
    return curve;
}

PairwiseCorrelation mean_pairwise_correlation(const std::vector<std::vector<double>>& rows) {
    std::vector<const std::vector<double>*> usable;
    PairwiseCorrelation result;
    for (const auto& row : rows) {
        if (has_variance(row))
            usable.push_back(&row);
        else
            ++result.excluded_rows;
    }
    if (usable.size() < 2)
        throw DegenerateEstimateError(
            "mean_pairwise_correlation: fewer than 2 non-constant vectors");
    double sum = 0.0;
    for (std::size_t a = 0; a < usable.size(); ++a)
        for (std::size_t b = a + 1; b < usable.size(); ++b) {
            sum += pearson(*usable[a], *usable[b]);
            ++result.pairs;
        }
    result.rho = sum / static_cast<double>(result.pairs);
    return result;
}

double within_colony_correlation(const std::vector<std::vector<double>>& preference_matrix) {
    return mean_pairwise_correlation(preference_matrix).rho;
}

}  // namespace antforest
