#include "mplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mplab {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

constexpr int kMaxRestarts = 8;
constexpr double kMinOmega = 1.0 / 64.0;

}  // namespace

void SolveConfig::validate() const
{
    if (!(picard_tol > 0.0) || !(cg_tol > 0.0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (!(omega > 0.0) || omega > 1.0)
        throw std::invalid_argument(fmt::format("damping omega must lie in (0, 1] (got {})", omega));
    if (picard_max_iter < 1 || cg_max_iter < 1)
        throw std::invalid_argument("iteration limits must be positive");
}

LinearSolveResult solve_linear(const SparseOperator& op, std::span<const double> rhs,
                               const SolveConfig& cfg)
{
    const std::size_t n = op.dim();
    if (rhs.size() != n)
        throw std::invalid_argument(
            fmt::format("right-hand side has size {}, operator has {}", rhs.size(), n));

    LinearSolveResult res;
    res.x.assign(n, 0.0);
    const double b2 = std::sqrt(dot(rhs, rhs));
    const double binf = norm_inf(rhs);
    if (binf == 0.0) {
        res.converged = true;
        return res;
    }

    std::vector<double> r(n), p(n), q(n);
    const auto true_residual = [&] {
        apply(op, res.x, q);
        for (std::size_t k = 0; k < n; ++k)
            r[k] = rhs[k] - q[k];
        return std::max(std::sqrt(dot(r, r)) / b2, norm_inf(r) / binf);
    };

    // The recursive residual drifts from the true one; restart from the true
    // residual until the converged iterate passes the audit.
    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        res.residual = true_residual();
        if (res.residual <= cfg.cg_tol) {
            res.converged = true;
            return res;
        }
        if (res.iterations >= cfg.cg_max_iter)
            break;
        p = r;
        double rr = dot(r, r);
        while (res.iterations < cfg.cg_max_iter) {
            apply(op, p, q);
            const double step = rr / dot(p, q);
            for (std::size_t k = 0; k < n; ++k) {
                res.x[k] += step * p[k];
                r[k] -= step * q[k];
            }
            ++res.iterations;
            const double rr_new = dot(r, r);
            if (std::sqrt(rr_new) <= cfg.cg_tol * b2 && norm_inf(r) <= cfg.cg_tol * binf)
                break;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t k = 0; k < n; ++k)
                p[k] = r[k] + beta * p[k];
        }
    }
    res.residual = true_residual();
    res.converged = res.residual <= cfg.cg_tol;
    return res;
}

double FieldStack::sup_norm(std::size_t i) const
{
    return norm_inf(components.at(i));
}

double FieldStack::min_value(std::size_t i) const
{
    const auto& c = components.at(i);
    return c.empty() ? 0.0 : *std::ranges::min_element(c);
}

FieldStack FieldStack::from_functions(std::shared_ptr<const Grid> grid, AlphaVector alpha,
                                      const std::vector<std::function<double(Point)>>& fields)
{
    if (!grid)
        throw std::invalid_argument("field stack needs a grid");
    FieldStack stack{grid, std::move(alpha), {}};
    for (const auto& fn : fields) {
        std::vector<double> values(grid->size());
        for (std::size_t u = 0; u < grid->size(); ++u)
            values[u] = fn(grid->coords(grid->node(u)));
        stack.components.push_back(std::move(values));
    }
    return stack;
}

void FieldStack::write_csv(std::ostream& os) const
{
    os << "i,j,x1,x2";
    for (std::size_t c = 0; c < m(); ++c)
        os << ",u_" << c + 1;
    os << '\n';
    for (std::size_t u = 0; u < grid->size(); ++u) {
        const NodeIndex n = grid->node(u);
        const Point p = grid->coords(n);
        fmt::print(os, "{},{},{:.17g},{:.17g}", n.i, n.j, p.x1, p.x2);
        for (const auto& c : components)
            fmt::print(os, ",{:.17g}", c[u]);
        os << '\n';
    }
}

namespace {

class Cascade {
public:
    Cascade(const Grid& grid, const AlphaVector& alpha, const SolveConfig& cfg) : cfg_(cfg)
    {
        for (double a : alpha.values())
            ops_.push_back(assemble(grid, a));
    }

    const SparseOperator& op(std::size_t i) const { return ops_[i]; }

    /// Solves (-Delta+alpha_m) u_m = rhs, then (-Delta+alpha_i) u_i = u_{i+1} downwards.
    bool run(std::span<const double> rhs, std::vector<std::vector<double>>& out, int& cg_iterations,
             std::string& error) const
    {
        const std::size_t m = ops_.size();
        out.assign(m, {});
        std::span<const double> source = rhs;
        for (std::size_t k = m; k-- > 0;) {
            LinearSolveResult r = solve_linear(ops_[k], source, cfg_);
            cg_iterations += r.iterations;
            if (!r.converged) {
                error = fmt::format("CG failed on component {} after {} iterations (residual {:.3e})",
                                    k + 1, r.iterations, r.residual);
                return false;
            }
            out[k] = std::move(r.x);
            source = out[k];
        }
        return true;
    }

private:
    const SolveConfig& cfg_;
    std::vector<SparseOperator> ops_;
};

}  // namespace

Solution solve_system(const Problem& problem)
{
    if (!problem.grid)
        throw std::invalid_argument("problem has no grid");
    problem.cfg.validate();
    const Grid& grid = *problem.grid;
    const std::size_t n = grid.size();
    const std::size_t m = problem.alpha.size();
    const NonlinearitySpec& f = problem.f;

    const Cascade cascade(grid, problem.alpha, problem.cfg);

    Solution sol{FieldStack{problem.grid, problem.alpha,
                            std::vector<std::vector<double>>(m, std::vector<double>(n, 0.0))},
                 SolveReport{}};
    SolveReport& rep = sol.report;
    rep.lipschitz = f.lipschitz();
    rep.final_omega = problem.cfg.omega;

    // The inverses are entrywise nonnegative, so their sup-norm is attained on the constant 1.
    {
        std::vector<std::vector<double>> probe;
        std::string err;
        const std::vector<double> ones(n, 1.0);
        if (cascade.run(ones, probe, rep.cg_iterations, err))
            rep.chain_inverse_norm = norm_inf(probe.front());
        rep.contraction_estimate = rep.lipschitz * rep.chain_inverse_norm;
    }

    std::vector<double> u1(n, 0.0);
    std::vector<double> rhs(n);
    std::vector<std::vector<double>> comps;
    double omega = problem.cfg.omega;
    double previous_update = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= problem.cfg.picard_max_iter; ++it) {
        for (std::size_t k = 0; k < n; ++k)
            rhs[k] = f(u1[k]);
        std::string err;
        if (!cascade.run(rhs, comps, rep.cg_iterations, err)) {
            rep.message = err;
            rep.picard_iterations = it;
            return sol;
        }
        double update = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            update = std::max(update, std::abs(comps[0][k] - u1[k]));
        rep.update_history.push_back(update);
        rep.picard_iterations = it;

        // A Lipschitz-zero right-hand side does not depend on u_1: one cascade is the solution.
        if (update < problem.cfg.picard_tol || rep.lipschitz == 0.0) {
            rep.converged = true;
            sol.stack.components = std::move(comps);
            break;
        }
        if (update > previous_update && omega > kMinOmega)
            omega = std::max(kMinOmega, 0.5 * omega);
        previous_update = update;
        for (std::size_t k = 0; k < n; ++k)
            u1[k] = (1.0 - omega) * u1[k] + omega * comps[0][k];
    }
    rep.final_omega = omega;

    if (!rep.converged) {
        rep.message = fmt::format("Picard iteration did not converge in {} steps (last update {:.3e})",
                                  problem.cfg.picard_max_iter, rep.update_history.back());
        sol.stack.components = comps;
    }

    auto& c = sol.stack.components;
    std::vector<double> au(n);
    rep.component_residuals.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        apply(cascade.op(i), c[i], au);
        double res = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double target = i + 1 < m ? c[i + 1][k] : f(c[0][k]);
            res = std::max(res, std::abs(au[k] - target));
        }
        rep.component_residuals[i] = res;
        rep.component_minima.push_back(sol.stack.min_value(i));
        rep.component_maxima.push_back(c[i].empty() ? 0.0 : *std::ranges::max_element(c[i]));
    }

    const double u1_min = rep.component_minima.front();
    rep.degenerate = sol.stack.sup_norm(0) == 0.0;
    rep.positive = u1_min > 0.0;
    if (rep.converged) {
        if (rep.degenerate)
            rep.message = "converged to the zero solution (degenerate, not strictly positive)";
        else if (!rep.positive)
            rep.message = fmt::format("converged but u_1 is not strictly positive (min {:.3e})", u1_min);
        else
            rep.message = "converged";
    }
    return sol;
}

void write_report(std::ostream& os, const SolveReport& r)
{
    fmt::print(os, "solve.converged = {}\n", r.converged);
    fmt::print(os, "solve.positive = {}\n", r.positive);
    fmt::print(os, "solve.degenerate = {}\n", r.degenerate);
    fmt::print(os, "solve.message = {}\n", r.message);
    fmt::print(os, "solve.picard_iterations = {}\n", r.picard_iterations);
    fmt::print(os, "solve.cg_iterations = {}\n", r.cg_iterations);
    fmt::print(os, "solve.final_omega = {}\n", r.final_omega);
    fmt::print(os, "solve.lipschitz = {}\n", r.lipschitz);
    fmt::print(os, "solve.chain_inverse_norm = {:.6e}\n", r.chain_inverse_norm);
    fmt::print(os, "solve.contraction_estimate = {:.6e}\n", r.contraction_estimate);
    fmt::print(os, "solve.last_update = {:.6e}\n", r.update_history.empty() ? 0.0 : r.update_history.back());
    for (std::size_t i = 0; i < r.component_residuals.size(); ++i) {
        fmt::print(os, "solve.u_{}.residual = {:.6e}\n", i + 1, r.component_residuals[i]);
        fmt::print(os, "solve.u_{}.min = {:.17g}\n", i + 1, r.component_minima[i]);
        fmt::print(os, "solve.u_{}.max = {:.17g}\n", i + 1, r.component_maxima[i]);
    }
}

}  // namespace mplab
