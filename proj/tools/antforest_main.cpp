#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "antforest/experiments.hpp"

namespace {

// Exit codes: 0 ok, 2 configuration, 3 io/runtime, 4 integrity.
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kIntegrityError = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"antforest: stochastic-ensemble experiments (random forests, "
                 "colony simulation, ACDF)"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("--config", config_path, "Path to the experiment config JSON")
        ->required();

    std::string run_dir;
    auto* summ = app.add_subcommand("summarize",
                                    "Recompute and cross-check aggregates of a finished run");
    summ->add_option("dir", run_dir, "Run output directory")->required();

    auto* list = app.add_subcommand("list-experiments", "List known experiment names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto config = antforest::ExperimentConfig::from_file(config_path);
            antforest::run_experiment(config);
            std::cout << "wrote " << config.output_dir << '\n';
        } else if (summ->parsed()) {
            const auto report = antforest::summarize(run_dir);
            std::cout << "OK\n" << report.table;
        } else if (list->parsed()) {
            for (const auto& name : antforest::list_experiments()) std::cout << name << '\n';
        }
    } catch (const antforest::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kIntegrityError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}
