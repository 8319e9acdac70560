#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mplab/discretize.hpp"
#include "mplab/geometry.hpp"
#include "mplab/nonlinearity.hpp"
#include "mplab/symcoeffs.hpp"

namespace mplab {

struct SolveConfig {
    double picard_tol = 1e-10;
    int picard_max_iter = 500;
    double omega = 1.0;
    double cg_tol = 1e-12;
    int cg_max_iter = 20000;

    void validate() const;
};

struct LinearSolveResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;  // final relative residual, max of the 2-norm and sup-norm ratios
    bool converged = false;
};

/// Conjugate gradients from a zero initial guess. Converged when the true
/// residual satisfies |r|_2 <= tol |b|_2 and |r|_inf <= tol |b|_inf.
LinearSolveResult solve_linear(const SparseOperator& op, std::span<const double> rhs,
                               const SolveConfig& cfg);

/// The vector solution U = (u_1, ..., u_m) on the grid's interior unknowns,
/// with u_{i+1} = (-Delta + alpha_i) u_i and (-Delta + alpha_m) u_m = f(u_1).
struct FieldStack {
    std::shared_ptr<const Grid> grid;
    AlphaVector alpha;
    std::vector<std::vector<double>> components;

    std::size_t m() const noexcept { return components.size(); }
    const std::vector<double>& u(std::size_t i) const { return components.at(i); }
    double sup_norm(std::size_t i) const;
    double min_value(std::size_t i) const;

    /// Samples f_i(x) at every interior node; used to inject prescribed fields.
    static FieldStack from_functions(std::shared_ptr<const Grid> grid, AlphaVector alpha,
                                     const std::vector<std::function<double(Point)>>& fields);

    /// Columns i, j, x1, x2, u_1 ... u_m.
    void write_csv(std::ostream& os) const;
};

struct SolveReport {
    bool converged = false;
    bool positive = false;     // u_1 > 0 at every interior node
    bool degenerate = false;   // u_1 identically zero
    int picard_iterations = 0;
    int cg_iterations = 0;
    double final_omega = 1.0;
    std::vector<double> update_history;
    std::vector<double> component_residuals;  // |(-Delta+alpha_i)u_i - u_{i+1}|_inf, last one vs f(u_1)
    std::vector<double> component_minima;
    std::vector<double> component_maxima;
    double lipschitz = 0.0;
    double chain_inverse_norm = 0.0;  // |prod_i (-Delta+alpha_i)^{-1}|_inf
    double contraction_estimate = 0.0;
    std::string message;

    bool ok() const noexcept { return converged && positive; }
};

struct Problem {
    std::shared_ptr<const Grid> grid;
    AlphaVector alpha;
    NonlinearitySpec f;
    SolveConfig cfg;
};

struct Solution {
    FieldStack stack;
    SolveReport report;
};

/// Damped Picard iteration over the cascade of shifted Dirichlet problems.
/// Throws std::invalid_argument for malformed problems (negative shifts,
/// invalid config); numerical failures are reported in SolveReport.
Solution solve_system(const Problem& problem);

void write_report(std::ostream& os, const SolveReport& report);

}  // namespace mplab
