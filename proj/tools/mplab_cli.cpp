#include <iostream>

#include <CLI11.hpp>

#include "mplab/experiment.hpp"
#include "mplab/geometry.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Moving-plane laboratory for polyharmonic Navier problems"};
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    app.add_flag("--quiet", quiet, "Suppress progress output");
    CLI11_PARSE(app, argc, argv);

    mplab::ExperimentConfig cfg;
    try {
        cfg = mplab::load_config(config_path);
    } catch (const mplab::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return 2;
    }
    if (!out_dir.empty())
        cfg.output_dir = out_dir;

    try {
        const auto outcome = mplab::run_experiment(cfg, quiet ? nullptr : &std::cout);
        return outcome.exit_status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
