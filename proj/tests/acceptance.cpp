// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mplab/discretize.hpp"
#include "mplab/geometry.hpp"
#include "mplab/solver.hpp"
#include "mplab/symcoeffs.hpp"
#include "mplab/verify.hpp"

using namespace mplab;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void run(const std::string& id, const std::string& title, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed)
        ++failures;
    std::cout << fmt::format("[{}] {} {}: {} ({:.1f}s)", o.passed ? "PASS" : "FAIL", id, title, o.detail, secs)
              << std::endl;
}

std::shared_ptr<const Grid> grid_of(const DomainSpec& d, int n)
{
    return std::make_shared<const Grid>(build_grid(d, n));
}

// max over interior nodes of |u_h - u| / |u|_inf
double profile_error(const FieldStack& s, std::size_t comp, const std::function<double(double)>& exact_of_r2,
                     double exact_sup)
{
    double err = 0.0;
    const Grid& g = *s.grid;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const Point p = g.coords(g.node(u));
        err = std::max(err, std::abs(s.u(comp)[u] - exact_of_r2(p.x1 * p.x1 + p.x2 * p.x2)));
    }
    return err / exact_sup;
}

bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1]))
            return false;
    return true;
}

constexpr double kRelTol = 0.05;
const int kResolutions[] = {16, 32, 64};

Outcome radial_m1()
{
    std::vector<double> errs, origin;
    for (int n : kResolutions) {
        const auto g = grid_of(DomainSpec::disc(), n);
        const Solution s = solve_system({g, AlphaVector({0.0}), NonlinearitySpec::constant(1.0), {}});
        if (!s.report.converged)
            return {false, "solve failed at n_cells = " + std::to_string(n)};
        errs.push_back(profile_error(s.stack, 0, [](double r2) { return (1 - r2) / 4; }, 0.25));
        origin.push_back(std::abs(s.stack.u(0)[*g->unknown(0, 0)] - 0.25) / 0.25);
    }
    const bool ok = errs.back() <= kRelTol && origin.back() <= kRelTol && strictly_decreasing(errs);
    return {ok, fmt::format("rel. profile error {:.4f} {:.4f} {:.4f}, origin {:.4f} at n=64 (tol {})", errs[0],
                            errs[1], errs[2], origin.back(), kRelTol)};
}

Outcome radial_m2()
{
    std::vector<double> e1, e2;
    double origin1 = 0.0;
    for (int n : kResolutions) {
        const auto g = grid_of(DomainSpec::disc(), n);
        const Solution s = solve_system({g, AlphaVector({0.0, 0.0}), NonlinearitySpec::constant(1.0), {}});
        if (!s.report.converged)
            return {false, "solve failed at n_cells = " + std::to_string(n)};
        e2.push_back(profile_error(s.stack, 1, [](double r2) { return (1 - r2) / 4; }, 0.25));
        e1.push_back(profile_error(
            s.stack, 0, [](double r2) { return (1 - r2) / 16 - (1 - r2 * r2) / 64; }, 3.0 / 64));
        origin1 = s.stack.u(0)[*g->unknown(0, 0)];
    }
    const bool ok = e1.back() <= kRelTol && e2.back() <= kRelTol && strictly_decreasing(e1) &&
                    strictly_decreasing(e2) && std::abs(origin1 - 3.0 / 64) / (3.0 / 64) <= kRelTol;
    return {ok, fmt::format("u_1 errors {:.4f} {:.4f} {:.4f}; u_2 errors {:.4f} {:.4f} {:.4f}; u_1(0) = {:.5f}",
                            e1[0], e1[1], e1[2], e2[0], e2[1], e2[2], origin1)};
}

// The conforming suite shared by the symmetry, monotonicity, sweep and c-bound criteria.
struct SuiteRun {
    std::string label;
    double symmetry = 0.0;
    double symmetry_limit = 0.0;
    double monotonicity = 0.0;
    double monotonicity_limit = 0.0;
    bool mu_zero = false;
    double c_min = 0.0;
    double c_max = 0.0;
    double lipschitz = 0.0;
    bool converged = false;
    std::string error;
};

std::vector<SuiteRun> run_suite()
{
    constexpr int kCells = 32;
    const std::vector<DomainSpec> domains = {DomainSpec::disc(), DomainSpec::ellipse(1.0, 0.6),
                                             DomainSpec::stadium(0.5, 0.5)};
    const std::vector<NonlinearitySpec> catalog = {
        NonlinearitySpec::constant(1.0), NonlinearitySpec::affine(1.0, 2.0),
        NonlinearitySpec::saturating(0.5, 3.0, 10.0), NonlinearitySpec::arctan(1.0, 1.0)};
    const std::vector<double> mixed = {0.0, 2.0, 0.5};

    std::vector<SuiteRun> runs;
    for (const auto& d : domains) {
        const auto g = grid_of(d, kCells);
        for (std::size_t m = 1; m <= 3; ++m) {
            const std::vector<std::vector<double>> alphas = {
                std::vector<double>(m, 0.0), std::vector<double>(m, 1.0),
                std::vector<double>(mixed.begin(), mixed.begin() + static_cast<std::ptrdiff_t>(m))};
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                for (const auto& f : catalog) {
                    SuiteRun r;
                    r.label = fmt::format("{} m={} alpha#{} f={}", to_string(d.shape), m, ai, f.describe());
                    try {
                        const SolveConfig cfg;
                        const Solution s = solve_system({g, AlphaVector(alphas[ai]), f, cfg});
                        r.converged = s.report.ok();
                        const double sup = s.stack.sup_norm(0);
                        r.symmetry = symmetry_defect(s.stack);
                        r.symmetry_limit = 100 * cfg.picard_tol;
                        r.monotonicity = monotonicity_defect(s.stack, g->h());
                        r.monotonicity_limit = 1e-8 * sup;
                        const MovingPlaneReport mp = sweep_mu(s.stack, 1e-8 * sup, &f);
                        r.mu_zero = mp.mu_is_zero();
                        r.c_min = mp.c_min.value_or(0.0);
                        r.c_max = mp.c_max.value_or(0.0);
                        r.lipschitz = f.lipschitz();
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                    runs.push_back(std::move(r));
                }
            }
        }
    }
    return runs;
}

template <typename Pred>
Outcome over_suite(const std::vector<SuiteRun>& runs, Pred ok, const std::string& what)
{
    std::size_t bad = 0;
    std::string first;
    for (const auto& r : runs) {
        if (!r.error.empty() || !r.converged || !ok(r)) {
            if (bad++ == 0)
                first = r.label + (r.error.empty() ? "" : " (" + r.error + ")");
        }
    }
    if (bad == 0)
        return {true, fmt::format("{} configurations, {}", runs.size(), what)};
    return {false, fmt::format("{} of {} configurations fail; first: {}", bad, runs.size(), first)};
}

Outcome negative_control()
{
    const auto g = grid_of(DomainSpec::shifted_disc({0.3, 0.0}), 32);
    const Solution s = solve_system({g, AlphaVector({0.0, 0.0}), NonlinearitySpec::constant(1.0), {}});
    if (!s.report.converged)
        return {false, "solve failed"};
    const double sup = s.stack.sup_norm(0);
    const double defect = symmetry_defect(s.stack);
    const MovingPlaneReport mp = sweep_mu(s.stack, 1e-8 * sup);
    const bool violates = mp.first_violation && *mp.first_violation > 0.0;
    return {defect >= 1e-2 * sup && violates,
            fmt::format("symmetry defect {:.3e} (>= {:.3e}), first violating lambda {}", defect, 1e-2 * sup,
                        mp.first_violation ? fmt::format("{:.5f}", *mp.first_violation) : "none")};
}

Outcome sign_equivalence_bruteforce()
{
    std::mt19937_64 rng(20261018);
    std::uniform_int_distribution<int> size(1, 8);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    constexpr int kTrials = 100000;
    int mismatches = 0;
    double worst_rel = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        std::vector<double> a(static_cast<std::size_t>(size(rng)));
        for (double& v : a) {
            do
                v = entry(rng);
            while (std::abs(v) < 1e-9);
        }
        const AlphaVector alpha(a);
        if (all_nonnegative_signs(alpha) != alpha.all_nonnegative())
            ++mismatches;
        const SymCoeffs s = expand_characteristic(alpha);
        std::vector<double> abs_a(a.size());
        std::ranges::transform(a, abs_a.begin(), [](double v) { return std::abs(v); });
        for (std::size_t k = 0; k <= a.size(); ++k) {
            const double oracle = subset_sum_coefficient(a, k);
            const double scale = subset_sum_coefficient(abs_a, k);
            worst_rel = std::max(worst_rel, std::abs(s[k] - oracle) / scale);
        }
    }
    return {mismatches == 0 && worst_rel <= 1e-12,
            fmt::format("{} trials, {} sign mismatches, worst relative deviation {:.2e} (tol 1e-12)", kTrials,
                        mismatches, worst_rel)};
}

Outcome barrier()
{
    constexpr double r = 0.5;
    std::string detail;
    bool ok = true;
    for (double a : {0.25, 0.5, 0.75}) {
        for (double K : {0.0, 1.0, 10.0}) {
            const BarrierReport b = barrier_check(a, r, K);
            const bool this_ok = b.found() && (K != 0.0 || b.r_star == r);
            ok = ok && this_ok;
            detail += fmt::format("{}a={},K={}: r*={:.3g}", detail.empty() ? "" : "; ", a, K, b.r_star);
        }
    }
    return {ok, detail};
}

Outcome singular_profile()
{
    constexpr int kCells = 64;
    const Grid g = build_grid(DomainSpec::disc(), kCells);
    std::vector<double> lambdas;
    for (int k = 2 * kCells - 1; k >= 0; --k)
        lambdas.push_back(0.5 * k * g.h());
    const MovingPlaneReport r = singular_profile_experiment(g, lambdas);

    bool positive = true;
    double zero_plane = 0.0;
    for (const auto& e : r.entries) {
        if (e.half_index > 0 && e.cap_size > 0 && !(e.minima[0] > 0.0))
            positive = false;
        if (e.half_index == 0)
            zero_plane = std::abs(e.minima[0]);
    }
    // Five-point truncation of G(0,.) is h^2/12 (G_xxxx + G_yyyy) at stencil points,
    // and |G_xxxx|, |G_yyyy| <= 6 / (2 pi r^4).
    constexpr double r_min = 0.1;
    const double h = g.h();
    const double residual = green_harmonic_residual(g, r_min);
    const double bound = h * h / (2 * std::numbers::pi * std::pow(r_min - h, 4));
    // Second-order decay measured at the same physical points with spacing 2h and h.
    const Grid coarse_grid = build_grid(DomainSpec::disc(), kCells / 2);
    const auto stencil = [](Point x, double step) {
        const auto G = [&](double dx, double dy) { return green_ball({0, 0}, {x.x1 + dx, x.x2 + dy}); };
        return std::abs(G(step, 0) + G(-step, 0) + G(0, step) + G(0, -step) - 4 * G(0, 0)) / (step * step);
    };
    double coarse = 0.0, fine = 0.0;
    for (const NodeIndex n : coarse_grid.nodes()) {
        const Point x = coarse_grid.coords(n);
        if (std::hypot(x.x1, x.x2) <= r_min || !coarse_grid.is_interior(n.i + 1, n.j) ||
            !coarse_grid.is_interior(n.i - 1, n.j) || !coarse_grid.is_interior(n.i, n.j + 1) ||
            !coarse_grid.is_interior(n.i, n.j - 1))
            continue;
        coarse = std::max(coarse, stencil(x, coarse_grid.h()));
        fine = std::max(fine, stencil(x, h));
    }
    const bool ok = positive && zero_plane <= 1e-12 && residual <= bound && coarse / fine >= 3.0;
    return {ok, fmt::format("all caps positive: {}; |v(0)| = {:.1e}; stencil residual {:.3e} <= {:.3e}, "
                            "refinement ratio {:.2f}",
                            positive, zero_plane, residual, bound, coarse / fine)};
}

Outcome operator_properties()
{
    std::size_t compared = 0;
    for (const DomainSpec& d : {DomainSpec::disc(), DomainSpec::ellipse(1.0, 0.6), DomainSpec::stadium(0.5, 0.5),
                                DomainSpec::lens(1.0)}) {
        for (int n = 8; n <= 32; ++n) {
            const Grid g = build_grid(d, n);
            const SparseOperator a = assemble(g, 1.25);
            for (std::size_t p = 0; p < a.dim(); ++p) {
                const std::size_t pp = *g.mirror_unknown(p);
                for (std::size_t k = a.row_ptr()[p]; k < a.row_ptr()[p + 1]; ++k) {
                    const std::size_t q = a.cols()[k];
                    const std::size_t qq = *g.mirror_unknown(q);
                    ++compared;
                    if (a.values()[k] != a.at(pp, qq))
                        return {false, fmt::format("{} n={}: A[{},{}] != A[P{},P{}]", to_string(d.shape), n, p, q, p, q)};
                }
                // Same number of nonzeros in mirrored rows means no entry of the mirror row is unmatched.
                if (a.row_ptr()[p + 1] - a.row_ptr()[p] != a.row_ptr()[pp + 1] - a.row_ptr()[pp])
                    return {false, "row patterns differ under the mirror"};
            }
        }
    }

    const Grid g = build_grid(DomainSpec::disc(), 64);
    const auto q = [](Point p) { return 1.0 + p.x1 - 2.0 * p.x2 + 3.0 * p.x1 * p.x1 - p.x1 * p.x2 + 0.5 * p.x2 * p.x2; };
    double worst = 0.0;
    for (double shift : {0.0, 2.5}) {
        const SparseOperator a = assemble(g, shift);
        std::vector<double> v(g.size());
        for (std::size_t u = 0; u < g.size(); ++u)
            v[u] = q(g.coords(g.node(u)));
        const auto av = mplab::apply(a, v);
        for (std::size_t u = 0; u < g.size(); ++u) {
            const NodeIndex n = g.node(u);
            if (g.is_interior(n.i + 1, n.j) && g.is_interior(n.i - 1, n.j) && g.is_interior(n.i, n.j + 1) &&
                g.is_interior(n.i, n.j - 1))
                worst = std::max(worst, std::abs(av[u] - (-7.0 + shift * v[u])));
        }
    }
    return {worst <= 1e-10, fmt::format("{} mirrored entries equal; quadratic stencil error {:.2e} (tol 1e-10)",
                                        compared, worst)};
}

}  // namespace

int main()
{
    run("AC1", "exact radial solution m=1", radial_m1);
    run("AC2", "exact radial solution m=2", radial_m2);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<SuiteRun> suite = run_suite();
    std::cout << fmt::format("       conforming suite solved in {:.1f}s",
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count())
              << std::endl;

    run("AC3", "symmetry", [&] {
        return over_suite(suite, [](const SuiteRun& r) { return r.symmetry <= r.symmetry_limit; },
                          "symmetry defect <= 100 * picard_tol");
    });
    run("AC4", "monotonicity", [&] {
        return over_suite(suite, [](const SuiteRun& r) { return r.monotonicity <= r.monotonicity_limit; },
                          "monotonicity defect <= 1e-8 |u_1|");
    });
    run("AC5", "moving-plane sweep", [&] {
        return over_suite(suite, [](const SuiteRun& r) { return r.mu_zero; }, "mu_hat = 0");
    });
    run("AC6", "negative control", negative_control);
    run("AC7", "sign equivalence brute force", sign_equivalence_bruteforce);
    run("AC8", "c(x, lambda) bounds", [&] {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& r : suite) {
            lo = std::min(lo, r.c_min);
            hi = std::max(hi, r.c_max - r.lipschitz);
        }
        Outcome o = over_suite(
            suite, [](const SuiteRun& r) { return r.c_min >= -1e-9 && r.c_max <= r.lipschitz + 1e-9; },
            "c within [-1e-9, L + 1e-9]");
        o.detail += fmt::format(" (min c {:.3e}, max c - L {:.3e})", lo, hi);
        return o;
    });
    run("AC9", "barrier inequality", barrier);
    run("AC10", "singular profile", singular_profile);
    run("AC11", "operator properties", operator_properties);

    std::cout << (failures == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failures))
              << std::endl;
    return failures == 0 ? 0 : 1;
}
