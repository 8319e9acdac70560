#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplab/geometry.hpp"
#include "mplab/nonlinearity.hpp"
#include "mplab/solver.hpp"

namespace mplab {

/// Malformed configuration; `line` is 0 when the problem is a missing key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what);
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct BarrierOptions {
    double a = 0.5;
    double r = 0.1;
    double K = 2.0;
};

struct ExperimentConfig {
    DomainSpec domain;
    int m = 1;
    std::vector<double> alpha;
    NonlinearitySpec f;
    int n_cells = 64;
    SolveConfig solve;
    bool sweep = true;
    double sweep_tol = 1e-8;  // relative to |u_1|_inf
    std::optional<BarrierOptions> barrier;
    bool singular = false;
    bool negative_control = false;
    std::filesystem::path output_dir = "out";
};

/// Line-oriented `key = value` text with `[section]` headers and `#` comments.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct F1Clause {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct F1Report {
    std::vector<F1Clause> clauses;
    double lipschitz = 0.0;

    bool passed() const;
    std::optional<std::string> first_failure() const;
};

/// Lipschitz on the half line, f(0) >= 0, nondecreasing.
F1Report check_f1(const NonlinearitySpec& f);

struct ExperimentOutcome {
    int exit_status = 0;
    bool solve_ok = false;
    bool sweep_expectation_met = true;
    std::string summary;
};

/// Runs validation, solve and verification, writing fields.csv, nodes.csv,
/// sweep.csv, plotdata/*.dat and report.txt into cfg.output_dir.
/// Exit status 0 iff the solve converged and the sweep matched expectation
/// (mu_hat = 0 on conforming domains, a violating lambda > 0 on the control).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace mplab
