#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace antforest {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string experiment;
    nlohmann::json params;  // experiment-specific; defaults filled at run time
    std::size_t replicates = 50;
    std::uint64_t seed = 0;
    std::string output_dir;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
};

std::vector<std::string> list_experiments();

// Executes the named experiment over its grid, writing rows.csv,
// aggregate.csv and manifest.json (written last, as the commit marker) into
// config.output_dir. Identical config + seed produce byte-identical CSVs.
// Startup problems (unknown experiment, bad grid, unwritable directory) are
// reported before any computation runs.
void run_experiment(const ExperimentConfig& config);

struct SummarizeReport {
    bool ok = false;
    std::string table;  // human-readable aggregate table
};

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Recomputes aggregates from the row-level CSV and cross-checks the stored
// aggregate.csv cell by cell; a mismatch raises IntegrityError naming the
// cell. Missing manifest raises std::runtime_error.
SummarizeReport summarize(const std::string& run_dir);

}  // namespace antforest
