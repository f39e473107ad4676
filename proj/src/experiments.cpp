#include "antforest/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "antforest/acdf.hpp"
#include "antforest/colony.hpp"
#include "antforest/csv.hpp"
#include "antforest/data_io.hpp"
#include "antforest/errors.hpp"
#include "antforest/info.hpp"
#include "antforest/metrics.hpp"
#include "antforest/parallel.hpp"

namespace antforest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kExperiments = {
    "variance-decomposition", "theta-sweep-forest", "theta-sweep-colony", "regime-search",
    "emergence-curves",       "info-decomposition", "acdf-vs-rf",
};

double pget(const json& p, const char* key, double def) {
    return p.contains(key) ? p.at(key).get<double>() : def;
}

std::size_t pget_u(const json& p, const char* key, std::size_t def) {
    return p.contains(key) ? p.at(key).get<std::size_t>() : def;
}

bool pget_b(const json& p, const char* key, bool def) {
    return p.contains(key) ? p.at(key).get<bool>() : def;
}

std::vector<double> pget_grid(const json& p, const char* key, std::vector<double> def) {
    if (!p.contains(key)) return def;
    auto grid = p.at(key).get<std::vector<double>>();
    if (grid.empty()) throw std::invalid_argument(std::string("empty grid: ") + key);
    return grid;
}

std::vector<double> default_theta_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

double parse_field(const CsvTable& table, std::size_t row, int col, const char* name) {
    if (col < 0) throw IntegrityError(std::string("rows.csv: missing column ") + name);
    if (row >= table.rows.size() || static_cast<std::size_t>(col) >= table.rows[row].size())
        throw IntegrityError("rows.csv: truncated row " + std::to_string(row + 1));
    return std::strtod(table.rows[row][static_cast<std::size_t>(col)].c_str(), nullptr);
}

ColonyConfig colony_config_from(const json& p) {
    ColonyConfig config;
    config.ant_count = pget_u(p, "ants", 100);
    config.site_count = pget_u(p, "sites", 50);
    config.steps = pget_u(p, "steps", 50);
    config.quality_gap = pget(p, "quality_gap", 2.0);
    config.obs_noise_sd = pget(p, "noise_sd", 1.0);
    config.recruit_scale = pget(p, "recruit_scale", 1.0);
    config.pheromone_evaporation = pget(p, "evaporation", 0.1);
    config.prior_mean = pget(p, "prior_mean", 0.0);
    config.prior_precision = pget(p, "prior_precision", 1.0);
    if (p.contains("quorum")) config.quorum = p.at("quorum").get<double>();
    return config;
}

// ---------------------------------------------------------------------------
// Each experiment produces rows.csv; the aggregate is recomputed from the
// written rows both here and in summarize(), so the two stay byte-identical
// and summarize can detect partial or corrupted row files.
// ---------------------------------------------------------------------------

struct AggregateTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

using Aggregator = AggregateTable (*)(const CsvTable&, const json&);

AggregateTable aggregate_variance_decomposition(const CsvTable& t, const json&) {
    const int c_sigma2 = t.column("sigma2"), c_rho = t.column("rho"), c_m = t.column("m");
    const int c_rel = t.column("rel_error");
    std::map<std::tuple<double, double, double>, std::vector<double>> cells;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto key = std::make_tuple(parse_field(t, r, c_sigma2, "sigma2"),
                                         parse_field(t, r, c_rho, "rho"),
                                         parse_field(t, r, c_m, "m"));
        cells[key].push_back(parse_field(t, r, c_rel, "rel_error"));
    }
    AggregateTable agg;
    agg.header = {"sigma2", "rho", "m", "mean_rel_error", "max_rel_error"};
    for (const auto& [key, errs] : cells) {
        agg.rows.push_back({format_number(std::get<0>(key)), format_number(std::get<1>(key)),
                            format_number(std::get<2>(key)), format_number(mean(errs)),
                            format_number(*std::max_element(errs.begin(), errs.end()))});
    }
    return agg;
}

AggregateTable aggregate_theta_sweep(const CsvTable& t, const json&) {
    const int c_system = t.column("system"), c_theta = t.column("theta"),
              c_rho = t.column("rho");
    if (c_system < 0) throw IntegrityError("rows.csv: missing column system");
    std::map<std::pair<std::string, double>, std::vector<double>> cells;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string system = t.rows[r][static_cast<std::size_t>(c_system)];
        const double theta = parse_field(t, r, c_theta, "theta");
        cells[{system, theta}].push_back(parse_field(t, r, c_rho, "rho"));
    }
    AggregateTable agg;
    agg.header = {"system", "theta", "mean_rho", "ci_low", "ci_high"};
    for (const auto& [key, rhos] : cells) {
        const MeanCi ci = mean_ci_normal(rhos);
        agg.rows.push_back({key.first, format_number(key.second), format_number(ci.mean),
                            format_number(ci.ci_low), format_number(ci.ci_high)});
    }
    return agg;
}

AggregateTable aggregate_regime_search(const CsvTable& t, const json&) {
    const int c_sites = t.column("sites"), c_steps = t.column("steps"),
              c_theta = t.column("theta"), c_rho = t.column("rho");
    struct Cell {
        std::vector<double> thetas, rhos;
        std::map<double, std::vector<double>> by_theta;
    };
    std::map<std::pair<double, double>, Cell> cells;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double sites = parse_field(t, r, c_sites, "sites");
        const double steps = parse_field(t, r, c_steps, "steps");
        const double theta = parse_field(t, r, c_theta, "theta");
        const double rho = parse_field(t, r, c_rho, "rho");
        Cell& cell = cells[{sites, steps}];
        cell.thetas.push_back(theta);
        cell.rhos.push_back(rho);
        cell.by_theta[theta].push_back(rho);
    }
    AggregateTable agg;
    agg.header = {"sites", "steps", "delta_rho", "slope", "slope_ci_low", "slope_ci_high"};
    for (const auto& [key, cell] : cells) {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto& [theta, rhos] : cell.by_theta) {
            const double m = mean(rhos);
            if (first) {
                lo = hi = m;
                first = false;
            }
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        const OlsFit fit = ols_fit(cell.thetas, cell.rhos);
        agg.rows.push_back({format_number(key.first), format_number(key.second),
                            format_number(hi - lo), format_number(fit.slope),
                            format_number(fit.slope_ci_low), format_number(fit.slope_ci_high)});
    }
    return agg;
}

AggregateTable aggregate_emergence(const CsvTable& t, const json& params) {
    const int c_theta = t.column("theta"), c_rep = t.column("replicate"),
              c_tim = t.column("t"), c_e = t.column("emergence"), c_a = t.column("alignment");
    const double threshold = pget(params, "emergence_threshold", 0.5);
    struct Curve {
        std::vector<std::pair<double, double>> points;  // (t, E)
        double final_alignment = 0.0;
        double final_t = -1.0;
    };
    std::map<std::pair<double, double>, Curve> curves;  // (theta, replicate)
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double theta = parse_field(t, r, c_theta, "theta");
        const double rep = parse_field(t, r, c_rep, "replicate");
        const double time = parse_field(t, r, c_tim, "t");
        Curve& curve = curves[{theta, rep}];
        curve.points.emplace_back(time, parse_field(t, r, c_e, "emergence"));
        if (time > curve.final_t) {
            curve.final_t = time;
            curve.final_alignment = parse_field(t, r, c_a, "alignment");
        }
    }
    std::map<double, std::vector<double>> crossing_by_theta, final_by_theta;
    for (auto& [key, curve] : curves) {
        std::sort(curve.points.begin(), curve.points.end());
        // First step at which E(t) reaches the threshold; censored at T.
        double crossing = static_cast<double>(curve.points.size());
        for (const auto& [time, e] : curve.points) {
            if (e >= threshold) {
                crossing = time;
                break;
            }
        }
        crossing_by_theta[key.first].push_back(crossing);
        final_by_theta[key.first].push_back(curve.final_alignment);
    }
    AggregateTable agg;
    agg.header = {"theta", "mean_crossing_time", "mean_final_alignment"};
    for (const auto& [theta, crossings] : crossing_by_theta) {
        agg.rows.push_back({format_number(theta), format_number(mean(crossings)),
                            format_number(mean(final_by_theta[theta]))});
    }
    return agg;
}

AggregateTable aggregate_info_decomposition(const CsvTable& t, const json& params) {
    const int c_theta = t.column("theta"), c_unit = t.column("i_unit"),
              c_pair = t.column("i_pair");
    std::map<double, std::pair<double, double>> by_theta;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        by_theta[parse_field(t, r, c_theta, "theta")] = {
            parse_field(t, r, c_unit, "i_unit"), parse_field(t, r, c_pair, "i_pair")};
    std::vector<double> thetas, i_unit, i_pair;
    for (const auto& [theta, curves] : by_theta) {
        thetas.push_back(theta);
        i_unit.push_back(curves.first);
        i_pair.push_back(curves.second);
    }
    AggregateTable agg;
    agg.header = {"theta_star", "crossings", "degenerate"};
    if (thetas.size() < 3) {
        agg.rows.push_back({"", "0", "0"});
        return agg;
    }
    const std::size_t condition_m =
        pget_u(params, "condition_m", pget_u(params, "ants", 100));
    const ThetaCondition cond = optimal_theta_condition(thetas, i_unit, i_pair, condition_m);
    agg.rows.push_back({cond.crossings.empty() ? "" : format_number(cond.crossings.front()),
                        std::to_string(cond.crossings.size()),
                        cond.degenerate ? "1" : "0"});
    return agg;
}

AggregateTable aggregate_acdf_vs_rf(const CsvTable& t, const json& params) {
    const int c_dataset = t.column("dataset"), c_alg = t.column("algorithm"),
              c_fold = t.column("fold"), c_rep = t.column("repeat"),
              c_acc = t.column("accuracy");
    if (c_dataset < 0 || c_alg < 0)
        throw IntegrityError("rows.csv: missing dataset/algorithm columns");
    const double margin = pget(params, "margin", 0.02);
    // Pair by (repeat, fold) within each dataset.
    std::map<std::string, std::map<std::pair<double, double>, std::pair<double, double>>> acc;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string dataset = t.rows[r][static_cast<std::size_t>(c_dataset)];
        const std::string alg = t.rows[r][static_cast<std::size_t>(c_alg)];
        const auto key = std::make_pair(parse_field(t, r, c_rep, "repeat"),
                                        parse_field(t, r, c_fold, "fold"));
        const double a = parse_field(t, r, c_acc, "accuracy");
        if (alg == "rf")
            acc[dataset][key].first = a;
        else
            acc[dataset][key].second = a;
    }
    AggregateTable agg;
    agg.header = {"dataset", "rf_mean_accuracy", "acdf_mean_accuracy", "mean_difference",
                  "ci_low", "ci_high", "verdict"};
    for (const auto& [dataset, folds] : acc) {
        std::vector<double> rf, acdf;
        for (const auto& [key, pair] : folds) {
            rf.push_back(pair.first);
            acdf.push_back(pair.second);
        }
        const EquivalenceResult eq = equivalence_test(rf, acdf, margin);
        agg.rows.push_back({dataset, format_number(mean(rf)), format_number(mean(acdf)),
                            format_number(eq.mean_difference), format_number(eq.ci_low),
                            format_number(eq.ci_high), verdict_name(eq.verdict)});
    }
    return agg;
}

Aggregator aggregator_for(const std::string& experiment) {
    if (experiment == "variance-decomposition") return aggregate_variance_decomposition;
    if (experiment == "theta-sweep-forest") return aggregate_theta_sweep;
    if (experiment == "theta-sweep-colony") return aggregate_theta_sweep;
    if (experiment == "regime-search") return aggregate_regime_search;
    if (experiment == "emergence-curves") return aggregate_emergence;
    if (experiment == "info-decomposition") return aggregate_info_decomposition;
    if (experiment == "acdf-vs-rf") return aggregate_acdf_vs_rf;
    throw std::invalid_argument("unknown experiment: " + experiment);
}

// ---------------------------------------------------------------------------
// Row production per experiment.
// ---------------------------------------------------------------------------

struct RunState {
    const ExperimentConfig& config;
    json params;
    std::size_t replicates = 0;
    json manifest_cells = json::array();

    std::uint64_t exp_seed() const {
        return derive_seed(config.seed, hash_string(config.experiment));
    }
    std::uint64_t cell_seed(std::size_t cell, const std::string& label) {
        const std::uint64_t seed = derive_seed(exp_seed(), cell);
        manifest_cells.push_back({{"cell", cell}, {"label", label}, {"seed", seed}});
        return seed;
    }
};

void run_variance_decomposition(RunState& state, CsvWriter& rows) {
    const double sigma2 = pget(state.params, "sigma2", 1.0);
    const auto rho_grid = pget_grid(state.params, "rho_grid", {0.0, 0.3, 0.7});
    const auto m_grid = pget_grid(state.params, "m_grid", {5, 20, 100});
    const auto draws = pget_u(state.params, "draws", 10000);

    std::size_t cell = 0;
    for (double rho : rho_grid) {
        for (double m_raw : m_grid) {
            const auto m = static_cast<std::size_t>(m_raw);
            const std::uint64_t seed = state.cell_seed(
                cell++, "rho=" + format_number(rho) + ",m=" + std::to_string(m));
            std::vector<VarianceOracleResult> results(state.replicates);
            parallel_for(state.replicates, [&](std::size_t rep) {
                results[rep] = variance_decomposition_oracle(sigma2, rho, m, draws,
                                                             derive_seed(seed, rep));
            });
            for (std::size_t rep = 0; rep < state.replicates; ++rep) {
                rows.field(sigma2).field(rho).field(m).field(rep).field(draws);
                rows.field(results[rep].empirical_variance)
                    .field(results[rep].theoretical_variance)
                    .field(results[rep].relative_error);
                rows.end_row();
            }
        }
    }
}

void write_sweep_rows(const SweepResult& sweep, CsvWriter& rows) {
    for (const auto& cell : sweep.cells)
        for (const auto& row : cell.rows) {
            rows.field(row.system)
                .field(row.theta)
                .field(row.replicate)
                .field(row.rho)
                .field(row.sigma2)
                .field(row.empirical_var)
                .field(row.theoretical_var);
            rows.end_row();
        }
}

void run_theta_sweep_forest(RunState& state, CsvWriter& rows) {
    ForestSweepSpec spec;
    spec.data_spec.kind = SyntheticKind::kFriedmanRegression;
    spec.data_spec.n = pget_u(state.params, "n", 500);
    spec.data_spec.p = pget_u(state.params, "p", 10);
    spec.data_spec.noise = pget(state.params, "noise_sd", 1.0);
    spec.forest.tree_count = pget_u(state.params, "trees", 50);
    spec.forest.min_node_size = pget_u(state.params, "min_node_size", 5);
    spec.forest.bootstrap = pget_b(state.params, "bootstrap", true);
    spec.test_point_count = pget_u(state.params, "test_points", 50);
    const auto grid = pget_grid(state.params, "theta_grid", default_theta_grid());

    for (std::size_t i = 0; i < grid.size(); ++i)
        state.cell_seed(i, "theta=" + format_number(grid[i]));
    const SweepResult sweep = theta_sweep(spec, grid, state.replicates, state.exp_seed());
    write_sweep_rows(sweep, rows);
}

void run_theta_sweep_colony(RunState& state, CsvWriter& rows) {
    ColonySweepSpec spec;
    spec.colony = colony_config_from(state.params);
    const auto grid = pget_grid(state.params, "theta_grid", default_theta_grid());

    for (std::size_t i = 0; i < grid.size(); ++i)
        state.cell_seed(i, "theta=" + format_number(grid[i]));
    const SweepResult sweep = theta_sweep(spec, grid, state.replicates, state.exp_seed());
    write_sweep_rows(sweep, rows);
}

void run_regime_search(RunState& state, CsvWriter& rows) {
    const auto sites_grid = pget_grid(state.params, "sites_grid", {5, 10, 20, 30, 50});
    const auto steps_grid = pget_grid(state.params, "steps_grid", {10, 20, 50, 100});
    const auto theta_grid = pget_grid(state.params, "theta_grid", default_theta_grid());

    std::size_t cell = 0;
    for (double sites : sites_grid) {
        for (double steps : steps_grid) {
            json cell_params = state.params;
            cell_params["sites"] = static_cast<std::size_t>(sites);
            cell_params["steps"] = static_cast<std::size_t>(steps);
            ColonySweepSpec spec;
            spec.colony = colony_config_from(cell_params);
            const std::uint64_t seed = state.cell_seed(
                cell++, "K=" + format_number(sites) + ",T=" + format_number(steps));
            const SweepResult sweep = theta_sweep(spec, theta_grid, state.replicates, seed);
            for (const auto& sweep_cell : sweep.cells)
                for (const auto& row : sweep_cell.rows) {
                    rows.field(sites).field(steps).field(row.theta).field(row.replicate);
                    rows.field(row.rho);
                    rows.end_row();
                }
        }
    }
}

void run_emergence_curves(RunState& state, CsvWriter& rows, const fs::path& dir) {
    const auto grid = pget_grid(state.params, "theta_grid", {0.1, 0.5, 0.9});
    const bool dump_traces = pget_b(state.params, "dump_traces", false);
    ColonyConfig base = colony_config_from(state.params);
    if (!state.params.contains("sites")) base.site_count = 20;
    if (!state.params.contains("quality_gap")) base.quality_gap = 4.0;
    if (!state.params.contains("steps")) base.steps = 100;

    std::unique_ptr<CsvWriter> traces, preferences;
    if (dump_traces) {
        traces = std::make_unique<CsvWriter>(
            (dir / "traces.csv").string(),
            std::vector<std::string>{"theta", "replicate", "t", "site", "recruitment",
                                     "colony_estimate"});
        preferences = std::make_unique<CsvWriter>(
            (dir / "preferences.csv").string(),
            std::vector<std::string>{"theta", "replicate", "ant", "site", "posterior_mean"});
    }

    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        const double theta = grid[cell];
        const std::uint64_t seed = state.cell_seed(cell, "theta=" + format_number(theta));
        std::vector<ColonyTrace> results(state.replicates);
        parallel_for(state.replicates, [&](std::size_t rep) {
            SyntheticSpec world_spec;
            world_spec.kind = SyntheticKind::kSiteWorld;
            world_spec.site_count = base.site_count;
            world_spec.noise = base.obs_noise_sd;
            world_spec.quality_gap = base.quality_gap;
            world_spec.seed = derive_seed(seed, rep, 0);
            const SiteWorld world = generate_site_world(world_spec);
            ColonyConfig config = base;
            config.p_explore = theta;
            config.seed = derive_seed(seed, rep, 1);
            results[rep] = run_colony(world, config);
        });
        for (std::size_t rep = 0; rep < state.replicates; ++rep) {
            const ColonyTrace& trace = results[rep];
            for (std::size_t t = 0; t < trace.step_count(); ++t) {
                rows.field(theta).field(rep).field(t).field(trace.emergence[t])
                    .field(trace.alignment[t]);
                rows.end_row();
                if (traces) {
                    for (std::size_t j = 0; j < trace.recruitment[t].size(); ++j) {
                        traces->field(theta).field(rep).field(t).field(j);
                        traces->field(trace.recruitment[t][j])
                            .field(trace.colony_estimate[t][j]);
                        traces->end_row();
                    }
                }
            }
            if (preferences) {
                for (std::size_t a = 0; a < trace.preference_matrix.size(); ++a)
                    for (std::size_t j = 0; j < trace.preference_matrix[a].size(); ++j) {
                        preferences->field(theta).field(rep).field(a).field(j);
                        preferences->field(trace.preference_matrix[a][j]);
                        preferences->end_row();
                    }
            }
        }
    }
    if (traces) traces->close();
    if (preferences) preferences->close();
}

void run_info_decomposition(RunState& state, CsvWriter& rows) {
    const auto grid = pget_grid(state.params, "theta_grid", default_theta_grid());
    const std::size_t units = pget_u(state.params, "units", 4);
    const std::size_t bins = pget_u(state.params, "bins", 8);
    ColonyConfig base = colony_config_from(state.params);
    if (units < 2 || units > base.ant_count)
        throw std::invalid_argument("info-decomposition: units must be in [2, ants]");

    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        const double theta = grid[cell];
        const std::uint64_t seed = state.cell_seed(cell, "theta=" + format_number(theta));

        std::vector<std::vector<double>> assessments(units,
                                                     std::vector<double>(state.replicates));
        std::vector<double> truth(state.replicates);
        parallel_for(state.replicates, [&](std::size_t rep) {
            SyntheticSpec world_spec;
            world_spec.kind = SyntheticKind::kSiteWorld;
            world_spec.site_count = base.site_count;
            world_spec.noise = base.obs_noise_sd;
            world_spec.quality_gap = base.quality_gap;
            world_spec.seed = derive_seed(seed, rep, 0);
            const SiteWorld world = generate_site_world(world_spec);
            ColonyConfig config = base;
            config.p_explore = theta;
            config.seed = derive_seed(seed, rep, 1);
            const ColonyTrace trace = run_colony(world, config);
            // Unit sample: the site each observed ant ends up preferring;
            // truth: the actual best site this replicate.
            for (std::size_t u = 0; u < units; ++u) {
                std::size_t best = 0;
                double best_mean = trace.preference_matrix[u][0];
                for (std::size_t j = 1; j < trace.preference_matrix[u].size(); ++j)
                    if (trace.preference_matrix[u][j] > best_mean) {
                        best = j;
                        best_mean = trace.preference_matrix[u][j];
                    }
                assessments[u][rep] = static_cast<double>(best);
            }
            truth[rep] = static_cast<double>(world.best_site);
        });

        const InfoDecomposition decomp = ensemble_info_decomposition(assessments, truth, bins);
        rows.field(theta).field(units).field(decomp.unit_info).field(decomp.pair_info);
        rows.field(decomp.pairwise_approx);
        rows.field(decomp.has_joint_info ? format_number(decomp.joint_info) : std::string());
        rows.field(decomp.sparse_warning ? 1 : 0);
        rows.end_row();
    }
}

void run_acdf_vs_rf(RunState& state, CsvWriter& rows) {
    const std::size_t dataset_count = pget_u(state.params, "datasets", 5);
    const std::size_t n = pget_u(state.params, "n", 400);
    std::vector<double> p_list = pget_grid(state.params, "p_list", {5, 10, 5, 10, 5});
    std::vector<double> noise_list =
        pget_grid(state.params, "noise_list", {0.05, 0.08, 0.1, 0.05, 0.08});
    const std::size_t folds = pget_u(state.params, "folds", 5);

    ForestConfig rf;
    rf.tree_count = pget_u(state.params, "rf_trees", 50);
    rf.min_node_size = pget_u(state.params, "rf_min_node_size", 1);

    AcdfConfig acdf;
    acdf.tree_count = pget_u(state.params, "acdf_trees", 50);
    acdf.ants_per_iteration = pget_u(state.params, "acdf_ants", 10);
    acdf.iterations = pget_u(state.params, "acdf_iterations", 20);
    acdf.bins = pget_u(state.params, "acdf_bins", 8);
    acdf.alpha = pget(state.params, "acdf_alpha", 1.0);
    acdf.beta = pget(state.params, "acdf_beta", 1.0);
    acdf.evaporation = pget(state.params, "acdf_evaporation", 0.1);

    struct FoldResult {
        double acc_rf = 0.0, acc_acdf = 0.0;
        double auc_rf = -1.0, auc_acdf = -1.0;  // negative = unavailable
        double nodes_rf = 0.0, nodes_acdf = 0.0;
    };

    for (std::size_t d = 0; d < dataset_count; ++d) {
        SyntheticSpec data_spec;
        data_spec.kind = SyntheticKind::kLinearSeparable;
        data_spec.n = n;
        data_spec.p = static_cast<std::size_t>(p_list[d % p_list.size()]);
        data_spec.noise = noise_list[d % noise_list.size()];
        const std::uint64_t dataset_seed = state.cell_seed(d, "dataset=synth-" + std::to_string(d));
        data_spec.seed = derive_seed(dataset_seed, 0xD47A);
        const Dataset data = generate_dataset(data_spec);

        std::vector<FoldResult> results(state.replicates * folds);
        parallel_for(state.replicates, [&](std::size_t repeat) {
            Rng shuffle_rng = make_rng(derive_seed(dataset_seed, repeat, 0));
            std::vector<std::size_t> order(data.row_count);
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), shuffle_rng);

            for (std::size_t fold = 0; fold < folds; ++fold) {
                std::vector<std::size_t> train_rows, test_rows;
                for (std::size_t i = 0; i < order.size(); ++i)
                    (i % folds == fold ? test_rows : train_rows).push_back(order[i]);

                Dataset train;
                train.task = data.task;
                train.feature_count = data.feature_count;
                train.class_count = data.class_count;
                train.row_count = train_rows.size();
                for (std::size_t r : train_rows) {
                    const auto row = data.row(r);
                    train.features.insert(train.features.end(), row.begin(), row.end());
                    train.targets.push_back(data.targets[r]);
                }

                FoldResult result;
                rf.seed = derive_seed(dataset_seed, repeat, fold, 1);
                const Forest rf_forest = train_forest(train, rf);
                AcdfConfig acdf_config = acdf;
                acdf_config.seed = derive_seed(dataset_seed, repeat, fold, 2);
                const Forest acdf_forest = train_acdf(train, acdf_config);

                auto evaluate = [&](const Forest& forest, double& acc, double& auc,
                                    double& nodes) {
                    double correct = 0.0;
                    std::vector<double> scores, labels;
                    for (std::size_t r : test_rows) {
                        const auto probs = predict_forest_proba(forest, data.row(r));
                        const auto cls = static_cast<std::size_t>(
                            std::max_element(probs.begin(), probs.end()) - probs.begin());
                        if (cls == static_cast<std::size_t>(data.targets[r])) correct += 1.0;
                        if (forest.class_count == 2) {
                            scores.push_back(probs[1]);
                            labels.push_back(data.targets[r]);
                        }
                    }
                    acc = correct / static_cast<double>(test_rows.size());
                    if (forest.class_count == 2) {
                        try {
                            auc = binary_auc(scores, labels);
                        } catch (const DegenerateEstimateError&) {
                            auc = -1.0;
                        }
                    }
                    double total_nodes = 0.0;
                    for (const auto& tree : forest.trees)
                        total_nodes += static_cast<double>(tree.node_count());
                    nodes = total_nodes / static_cast<double>(forest.tree_count());
                };
                evaluate(rf_forest, result.acc_rf, result.auc_rf, result.nodes_rf);
                evaluate(acdf_forest, result.acc_acdf, result.auc_acdf, result.nodes_acdf);
                results[repeat * folds + fold] = result;
            }
        });

        for (std::size_t repeat = 0; repeat < state.replicates; ++repeat) {
            for (std::size_t fold = 0; fold < folds; ++fold) {
                const FoldResult& r = results[repeat * folds + fold];
                const std::string dataset = "synth-" + std::to_string(d);
                rows.field(dataset).field(std::string("rf")).field(fold).field(repeat);
                rows.field(r.acc_rf);
                rows.field(r.auc_rf >= 0 ? format_number(r.auc_rf) : std::string());
                rows.field(r.nodes_rf);
                rows.end_row();
                rows.field(dataset).field(std::string("acdf")).field(fold).field(repeat);
                rows.field(r.acc_acdf);
                rows.field(r.auc_acdf >= 0 ? format_number(r.auc_acdf) : std::string());
                rows.field(r.nodes_acdf);
                rows.end_row();
            }
        }
    }
}

std::vector<std::string> rows_header(const std::string& experiment) {
    if (experiment == "variance-decomposition")
        return {"sigma2", "rho", "m", "replicate", "draws",
                "empirical_var", "theoretical_var", "rel_error"};
    if (experiment == "theta-sweep-forest" || experiment == "theta-sweep-colony")
        return {"system", "theta", "replicate", "rho", "sigma2",
                "empirical_var", "theoretical_var"};
    if (experiment == "regime-search") return {"sites", "steps", "theta", "replicate", "rho"};
    if (experiment == "emergence-curves")
        return {"theta", "replicate", "t", "emergence", "alignment"};
    if (experiment == "info-decomposition")
        return {"theta", "m_units", "i_unit", "i_pair", "pairwise_approx",
                "joint_info", "sparse_warning"};
    if (experiment == "acdf-vs-rf")
        return {"dataset", "algorithm", "fold", "repeat", "accuracy", "auc", "tree_nodes"};
    throw std::invalid_argument("unknown experiment: " + experiment);
}

std::size_t default_replicates(const std::string& experiment) {
    if (experiment == "variance-decomposition") return 1;
    if (experiment == "theta-sweep-forest") return 30;
    if (experiment == "info-decomposition") return 400;
    if (experiment == "acdf-vs-rf") return 10;
    return 50;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig config;
    config.experiment = j.at("experiment").get<std::string>();
    config.params = j.value("params", json::object());
    config.replicates = j.value("replicates", std::size_t{0});
    config.seed = j.value("seed", std::uint64_t{0});
    config.output_dir = j.value("output_dir", std::string{});
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

std::vector<std::string> list_experiments() { return kExperiments; }

void run_experiment(const ExperimentConfig& config) {
    if (std::find(kExperiments.begin(), kExperiments.end(), config.experiment) ==
        kExperiments.end())
        throw std::invalid_argument("unknown experiment: " + config.experiment);
    if (config.output_dir.empty())
        throw std::invalid_argument("run_experiment: output_dir is required");
    rows_header(config.experiment);  // validates the name before any work

    RunState state{config, config.params, config.replicates, json::array()};
    if (state.replicates == 0) state.replicates = default_replicates(config.experiment);
    if (state.replicates < 1) throw std::invalid_argument("run_experiment: replicates < 1");
    if ((config.experiment == "theta-sweep-forest" ||
         config.experiment == "theta-sweep-colony" || config.experiment == "regime-search") &&
        state.replicates < 2)
        throw std::invalid_argument("run_experiment: sweeps need >= 2 replicates");

    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + dir.string());

    const auto start = std::chrono::steady_clock::now();
    {
        CsvWriter rows((dir / "rows.csv").string(), rows_header(config.experiment));
        if (config.experiment == "variance-decomposition")
            run_variance_decomposition(state, rows);
        else if (config.experiment == "theta-sweep-forest")
            run_theta_sweep_forest(state, rows);
        else if (config.experiment == "theta-sweep-colony")
            run_theta_sweep_colony(state, rows);
        else if (config.experiment == "regime-search")
            run_regime_search(state, rows);
        else if (config.experiment == "emergence-curves")
            run_emergence_curves(state, rows, dir);
        else if (config.experiment == "info-decomposition")
            run_info_decomposition(state, rows);
        else
            run_acdf_vs_rf(state, rows);
        rows.close();
    }

    // The aggregate is derived from the rows file it ships with, so a rerun
    // of summarize() reproduces it byte for byte.
    const CsvTable rows_table = read_csv((dir / "rows.csv").string());
    const AggregateTable agg = aggregator_for(config.experiment)(rows_table, state.params);
    {
        CsvWriter out((dir / "aggregate.csv").string(), agg.header);
        for (const auto& row : agg.rows) {
            for (const auto& cell : row) out.field(cell);
            out.end_row();
        }
        out.close();
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
    json manifest;
    manifest["version"] = kVersion;
    manifest["experiment"] = config.experiment;
    manifest["seed"] = config.seed;
    manifest["replicates"] = state.replicates;
    manifest["params"] = state.params;
    manifest["cells"] = state.manifest_cells;
    manifest["row_count"] = rows_table.rows.size();
    manifest["wall_time_seconds"] = wall;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest");
    out << manifest.dump(2) << '\n';
}

SummarizeReport summarize(const std::string& run_dir) {
    const fs::path dir(run_dir);
    std::ifstream manifest_in(dir / "manifest.json");
    if (!manifest_in)
        throw std::runtime_error("missing manifest: " + (dir / "manifest.json").string());
    json manifest;
    manifest_in >> manifest;
    const std::string experiment = manifest.at("experiment").get<std::string>();
    const json params = manifest.value("params", json::object());

    const CsvTable rows = read_csv((dir / "rows.csv").string());
    if (manifest.contains("row_count") &&
        rows.rows.size() != manifest.at("row_count").get<std::size_t>())
        throw IntegrityError("rows.csv: row count " + std::to_string(rows.rows.size()) +
                             " does not match manifest " +
                             manifest.at("row_count").dump());

    const AggregateTable recomputed = aggregator_for(experiment)(rows, params);
    const CsvTable stored = read_csv((dir / "aggregate.csv").string());
    if (stored.header != recomputed.header)
        throw IntegrityError("aggregate.csv: header mismatch");
    if (stored.rows.size() != recomputed.rows.size())
        throw IntegrityError("aggregate.csv: expected " +
                             std::to_string(recomputed.rows.size()) + " rows, found " +
                             std::to_string(stored.rows.size()));
    for (std::size_t r = 0; r < stored.rows.size(); ++r) {
        if (stored.rows[r] != recomputed.rows[r]) {
            std::string cell_name = recomputed.rows[r].empty() ? std::to_string(r)
                                                               : recomputed.rows[r][0];
            if (recomputed.rows[r].size() > 1) cell_name += "," + recomputed.rows[r][1];
            throw IntegrityError("aggregate.csv: mismatch at cell " + cell_name);
        }
    }

    std::ostringstream table;
    table << "experiment: " << experiment << "  (rows: " << rows.rows.size()
          << ", replicates: " << manifest.value("replicates", std::size_t{0}) << ")\n";
    for (std::size_t c = 0; c < recomputed.header.size(); ++c) {
        if (c) table << "  ";
        table << recomputed.header[c];
    }
    table << '\n';
    for (const auto& row : recomputed.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) table << "  ";
            table << (row[c].empty() ? "-" : row[c]);
        }
        table << '\n';
    }
    if (experiment == "info-decomposition")
        table << "(information columns are in nats; divide by ln 2 for bits)\n";

    SummarizeReport report;
    report.ok = true;
    report.table = table.str();
    return report;
}

}  // namespace antforest
