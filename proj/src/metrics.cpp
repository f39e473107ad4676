#include "antforest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "antforest/errors.hpp"
#include "antforest/parallel.hpp"

namespace antforest {

double theoretical_ensemble_variance(double sigma2, double rho, std::size_t m) {
    if (sigma2 < 0) throw std::invalid_argument("theoretical_ensemble_variance: sigma2 < 0");
    if (rho < -1 || rho > 1)
        throw std::invalid_argument("theoretical_ensemble_variance: rho outside [-1, 1]");
    if (m < 1) throw std::invalid_argument("theoretical_ensemble_variance: m < 1");
    return rho * sigma2 + (1.0 - rho) * sigma2 / static_cast<double>(m);
}

DecompositionRecord make_decomposition_record(double sigma2, double rho, std::size_t m,
                                              double empirical_variance) {
    DecompositionRecord rec;
    rec.unit_variance = sigma2;
    rec.pairwise_correlation = rho;
    rec.ensemble_size = m;
    rec.theoretical_variance = theoretical_ensemble_variance(sigma2, rho, m);
    rec.empirical_variance = empirical_variance;
    return rec;
}

double generalization_error_decomposition(double bias2, double sigma2, double rho,
                                          std::optional<std::size_t> m, double noise) {
    if (bias2 < 0 || sigma2 < 0 || noise < 0)
        throw std::invalid_argument("generalization_error_decomposition: negative component");
    if (rho < -1 || rho > 1)
        throw std::invalid_argument("generalization_error_decomposition: rho outside [-1, 1]");
    if (m && *m < 1) throw std::invalid_argument("generalization_error_decomposition: m < 1");
    const double reducible =
        m ? (1.0 - rho) * sigma2 / static_cast<double>(*m) : 0.0;
    return bias2 + rho * sigma2 + reducible + noise;
}

CorrelationBound make_correlation_bound(double rho_max, double theta) {
    if (theta < 0 || theta > 1)
        throw std::invalid_argument("make_correlation_bound: theta outside [0, 1]");
    return {rho_max, theta, rho_max * (1.0 - theta)};
}

BoundCheck correlation_bound_check(double rho_observed, double rho_max, double theta,
                                   double slack) {
    if (slack < 0) throw std::invalid_argument("correlation_bound_check: negative slack");
    const CorrelationBound bound = make_correlation_bound(rho_max, theta);
    BoundCheck check;
    check.bound = bound.bound;
    check.margin = bound.bound + slack - rho_observed;
    check.pass = check.margin >= 0.0;
    return check;
}

VarianceOracleResult variance_decomposition_oracle(double sigma2, double rho, std::size_t m,
                                                   std::size_t draws, std::uint64_t seed) {
    if (draws < 2) throw std::invalid_argument("variance_decomposition_oracle: draws < 2");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(sigma2);
    const double a = std::sqrt(rho), b = std::sqrt(1.0 - rho);

    // Two-pass-free variance of the ensemble mean across draws.
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        const double shared = normal(rng);
        double unit_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            unit_sum += sd * (a * shared + b * normal(rng));
        const double ensemble_mean = unit_sum / static_cast<double>(m);
        sum += ensemble_mean;
        sumsq += ensemble_mean * ensemble_mean;
    }
    const double n = static_cast<double>(draws);
    VarianceOracleResult result;
    result.empirical_variance = (sumsq - sum * sum / n) / (n - 1.0);
    result.theoretical_variance = theoretical_ensemble_variance(sigma2, rho, m);
    result.relative_error =
        std::abs(result.empirical_variance - result.theoretical_variance) /
        std::max(result.theoretical_variance, 1e-300);
    return result;
}

double EnsembleStats::mean_sigma2() const { return mean(sigma2); }
double EnsembleStats::mean_empirical_var() const { return mean(empirical_var); }
double EnsembleStats::mean_theoretical_var() const { return mean(theoretical_var); }

EnsembleStats ensemble_prediction_stats(
    const std::vector<std::vector<std::vector<double>>>& predictions) {
    if (predictions.size() < 2)
        throw std::invalid_argument("ensemble_prediction_stats: need >= 2 replicates");
    const std::size_t units = predictions[0].size();
    if (units < 2) throw std::invalid_argument("ensemble_prediction_stats: need >= 2 units");
    const std::size_t points = predictions[0][0].size();
    if (points < 1)
        throw std::invalid_argument("ensemble_prediction_stats: need >= 1 test point");
    for (const auto& forest : predictions) {
        if (forest.size() != units)
            throw std::invalid_argument("ensemble_prediction_stats: ragged unit counts");
        for (const auto& unit : forest)
            if (unit.size() != points)
                throw std::invalid_argument("ensemble_prediction_stats: ragged point counts");
    }

    EnsembleStats stats;
    stats.ensemble_size = units;

    // Within-replicate pairwise correlation, averaged over replicates.
    double rho_sum = 0.0;
    std::size_t rho_count = 0;
    for (const auto& forest : predictions) {
        try {
            const PairwiseCorrelation pc = mean_pairwise_correlation(forest);
            rho_sum += pc.rho;
            stats.degenerate_units += pc.excluded_rows;
            ++rho_count;
        } catch (const DegenerateEstimateError&) {
            stats.degenerate_units += forest.size();
            ++stats.degenerate_replicates;
        }
    }
    if (rho_count == 0)
        throw DegenerateEstimateError(
            "ensemble_prediction_stats: all replicates had constant unit predictions");
    stats.rho = rho_sum / static_cast<double>(rho_count);

    stats.sigma2.resize(points);
    stats.empirical_var.resize(points);
    stats.theoretical_var.resize(points);
    std::vector<double> pooled, forest_means;
    pooled.reserve(predictions.size() * units);
    forest_means.reserve(predictions.size());
    for (std::size_t t = 0; t < points; ++t) {
        pooled.clear();
        forest_means.clear();
        for (const auto& forest : predictions) {
            double fsum = 0.0;
            for (const auto& unit : forest) {
                pooled.push_back(unit[t]);
                fsum += unit[t];
            }
            forest_means.push_back(fsum / static_cast<double>(units));
        }
        stats.sigma2[t] = sample_variance(pooled);
        stats.empirical_var[t] = sample_variance(forest_means);
        stats.theoretical_var[t] = theoretical_ensemble_variance(stats.sigma2[t], stats.rho, units);
    }
    return stats;
}

EnsembleStats empirical_tree_stats(const std::vector<Forest>& forests,
                                   const std::vector<std::vector<double>>& test_points) {
    if (forests.size() < 2)
        throw std::invalid_argument("empirical_tree_stats: need >= 2 forests");
    std::vector<std::vector<std::vector<double>>> predictions(forests.size());
    for (std::size_t r = 0; r < forests.size(); ++r) {
        const Forest& forest = forests[r];
        if (forest.tree_count() < 2)
            throw std::invalid_argument("empirical_tree_stats: need >= 2 trees per forest");
        predictions[r].resize(forest.tree_count());
        for (std::size_t b = 0; b < forest.tree_count(); ++b) {
            auto& row = predictions[r][b];
            row.reserve(test_points.size());
            for (const auto& x : test_points) row.push_back(forest.trees[b].predict(x));
        }
    }
    return ensemble_prediction_stats(predictions);
}

OlsFit SweepResult::rho_trend() const {
    std::vector<double> thetas, rhos;
    for (const auto& cell : cells)
        for (const auto& row : cell.rows) {
            thetas.push_back(row.theta);
            rhos.push_back(row.rho);
        }
    return ols_fit(thetas, rhos);
}

double SweepResult::delta_rho() const {
    double lo = cells.front().rho_ci.mean, hi = lo;
    for (const auto& cell : cells) {
        lo = std::min(lo, cell.rho_ci.mean);
        hi = std::max(hi, cell.rho_ci.mean);
    }
    return hi - lo;
}

namespace {

void check_sweep_args(std::span<const double> grid, std::size_t replicates) {
    if (grid.empty()) throw std::invalid_argument("theta_sweep: empty grid");
    if (replicates < 2)
        throw std::invalid_argument("theta_sweep: need >= 2 replicates (CI undefined)");
    for (double theta : grid)
        if (theta < 0 || theta > 1)
            throw std::invalid_argument("theta_sweep: theta outside [0, 1]");
}

SweepCell finish_cell(std::string system, double theta, std::vector<SweepRow> rows,
                      const std::vector<double>& cell_empirical_var) {
    SweepCell cell;
    cell.system = std::move(system);
    cell.theta = theta;
    std::vector<double> rhos;
    for (auto& row : rows) {
        row.empirical_var = mean(cell_empirical_var);
        rhos.push_back(row.rho);
    }
    cell.rho_ci = mean_ci_normal(rhos);
    cell.rows = std::move(rows);
    return cell;
}

}  // namespace

SweepResult theta_sweep(const ForestSweepSpec& spec, std::span<const double> grid,
                        std::size_t replicates, std::uint64_t master_seed) {
    check_sweep_args(grid, replicates);
    const std::size_t p = spec.data_spec.p;

    // Test points shared by every cell and replicate, drawn from the same
    // synthetic family.
    SyntheticSpec test_spec = spec.data_spec;
    test_spec.n = std::max<std::size_t>(2, spec.test_point_count);
    test_spec.seed = derive_seed(master_seed, hash_string("test-points"));
    const Dataset test_data = generate_dataset(test_spec);
    std::vector<std::vector<double>> test_points;
    for (std::size_t r = 0; r < test_data.row_count; ++r) {
        const auto row = test_data.row(r);
        test_points.emplace_back(row.begin(), row.end());
    }

    SweepResult result;
    result.cells.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t cell_index) {
        const double theta = grid[cell_index];
        const std::uint64_t cell_seed = derive_seed(master_seed, cell_index);
        const auto mtry = static_cast<std::size_t>(std::clamp(
            std::llround((1.0 - theta) * static_cast<double>(p)), 1LL,
            static_cast<long long>(p)));

        std::vector<std::vector<std::vector<double>>> predictions(replicates);
        std::vector<SweepRow> rows(replicates);
        for (std::size_t rep = 0; rep < replicates; ++rep) {
            SyntheticSpec data_spec = spec.data_spec;
            data_spec.seed = derive_seed(cell_seed, rep, 0);
            const Dataset data = generate_dataset(data_spec);

            ForestConfig config = spec.forest;
            config.mtry = mtry;
            config.seed = derive_seed(cell_seed, rep, 1);
            const Forest forest = train_forest(data, config);

            auto& preds = predictions[rep];
            preds.resize(forest.tree_count());
            for (std::size_t b = 0; b < forest.tree_count(); ++b)
                for (const auto& x : test_points)
                    preds[b].push_back(forest.trees[b].predict(x));
        }

        const EnsembleStats stats = ensemble_prediction_stats(predictions);
        for (std::size_t rep = 0; rep < replicates; ++rep) {
            // Per-replicate correlation and unit variance; the cell-level
            // empirical ensemble variance is filled by finish_cell.
            const auto& preds = predictions[rep];
            SweepRow row;
            row.system = "forest";
            row.theta = theta;
            row.replicate = rep;
            PairwiseCorrelation pc;
            try {
                pc = mean_pairwise_correlation(preds);
            } catch (const DegenerateEstimateError&) {
                pc.rho = 1.0;  // all trees constant and equal
            }
            row.rho = pc.rho;
            std::vector<double> point_vars;
            std::vector<double> column(preds.size());
            for (std::size_t t = 0; t < test_points.size(); ++t) {
                for (std::size_t b = 0; b < preds.size(); ++b) column[b] = preds[b][t];
                point_vars.push_back(sample_variance(column));
            }
            row.sigma2 = mean(point_vars);
            row.theoretical_var =
                theoretical_ensemble_variance(row.sigma2, row.rho, preds.size());
            rows[rep] = std::move(row);
        }
        result.cells[cell_index] =
            finish_cell("forest", theta, std::move(rows), stats.empirical_var);
    });
    return result;
}

SweepResult theta_sweep(const ColonySweepSpec& spec, std::span<const double> grid,
                        std::size_t replicates, std::uint64_t master_seed) {
    check_sweep_args(grid, replicates);

    SweepResult result;
    result.cells.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t cell_index) {
        const double theta = grid[cell_index];
        const std::uint64_t cell_seed = derive_seed(master_seed, cell_index);

        std::vector<SweepRow> rows(replicates);
        // Colony mean assessments in quality-rank space, per replicate, so
        // that variance across replicates compares like sites even though
        // each replicate permutes the quality ladder.
        std::vector<std::vector<double>> colony_means(replicates);
        for (std::size_t rep = 0; rep < replicates; ++rep) {
            SyntheticSpec world_spec;
            world_spec.kind = SyntheticKind::kSiteWorld;
            world_spec.site_count = spec.colony.site_count;
            world_spec.noise = spec.colony.obs_noise_sd;
            world_spec.quality_gap = spec.colony.quality_gap;
            world_spec.seed = derive_seed(cell_seed, rep, 0);
            const SiteWorld world = generate_site_world(world_spec);

            ColonyConfig config = spec.colony;
            config.p_explore = theta;
            config.seed = derive_seed(cell_seed, rep, 1);
            const ColonyTrace trace = run_colony(world, config);

            SweepRow row;
            row.system = "colony";
            row.theta = theta;
            row.replicate = rep;
            row.rho = within_colony_correlation(trace.preference_matrix);

            const std::size_t sites = world.site_count();
            const std::size_t ants = trace.preference_matrix.size();
            std::vector<std::size_t> rank_order(sites);
            for (std::size_t j = 0; j < sites; ++j) rank_order[j] = j;
            std::sort(rank_order.begin(), rank_order.end(), [&](std::size_t a, std::size_t b) {
                return world.qualities[a] < world.qualities[b];
            });

            std::vector<double> site_vars;
            std::vector<double> column(ants);
            colony_means[rep].resize(sites);
            for (std::size_t rank = 0; rank < sites; ++rank) {
                const std::size_t j = rank_order[rank];
                double sum = 0.0;
                for (std::size_t a = 0; a < ants; ++a) {
                    column[a] = trace.preference_matrix[a][j];
                    sum += column[a];
                }
                colony_means[rep][rank] = sum / static_cast<double>(ants);
                if (ants >= 2) site_vars.push_back(sample_variance(column));
            }
            row.sigma2 = site_vars.empty() ? 0.0 : mean(site_vars);
            row.theoretical_var = theoretical_ensemble_variance(row.sigma2, row.rho, ants);
            rows[rep] = std::move(row);
        }

        const std::size_t sites = colony_means.front().size();
        std::vector<double> empirical(sites);
        std::vector<double> column(replicates);
        for (std::size_t rank = 0; rank < sites; ++rank) {
            for (std::size_t rep = 0; rep < replicates; ++rep)
                column[rep] = colony_means[rep][rank];
            empirical[rank] = sample_variance(column);
        }
        result.cells[cell_index] = finish_cell("colony", theta, std::move(rows), empirical);
    });
    return result;
}

}  // namespace antforest
