#include "mplab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroDiff = 1e-12;
constexpr double kCSlack = 1e-9;

/// Value of component c at the mirror image of node n about the plane.
double reflected_value(const FieldStack& stack, std::size_t c, NodeIndex n, const HalfGridPlane& plane)
{
    const Grid& g = *stack.grid;
    const int ri = plane.reflect_i(n.i);
    if (auto u = g.unknown(ri, n.j))
        return stack.components[c][*u];
    if (g.classify(ri, n.j) == NodeClass::exterior && g.conforming())
        throw std::runtime_error(fmt::format(
            "reflection of node ({}, {}) about lambda = {} leaves the domain", n.i, n.j, plane.lambda()));
    return 0.0;
}

struct CapLayout {
    std::vector<std::size_t> nodes;
    std::optional<NodeIndex> excluded;
    PoleLocation pole_location = PoleLocation::outside;
};

CapLayout cap_layout(const Grid& grid, const HalfGridPlane& plane)
{
    CapLayout layout;
    layout.nodes = cap_nodes(grid, plane);

    // 0_lambda, the mirror of the puncture; default puncture is the origin node.
    NodeIndex pole{0, 0};
    if (auto p = grid.puncture())
        pole = grid.node(*p);
    const NodeIndex image{plane.reflect_i(pole.i), pole.j};
    switch (grid.classify(image.i, image.j)) {
    case NodeClass::interior: layout.pole_location = PoleLocation::inside; break;
    case NodeClass::boundary: layout.pole_location = PoleLocation::staircase_band; break;
    case NodeClass::exterior: layout.pole_location = PoleLocation::outside; break;
    }
    if (plane.half_index > 0 && grid.puncture()) {
        if (auto u = grid.unknown(image.i, image.j)) {
            const auto it = std::ranges::find(layout.nodes, *u);
            if (it != layout.nodes.end()) {
                layout.nodes.erase(it);
                layout.excluded = image;
            }
        }
    }
    return layout;
}

}  // namespace

std::string to_string(PoleLocation loc)
{
    switch (loc) {
    case PoleLocation::inside: return "inside";
    case PoleLocation::staircase_band: return "staircase-band";
    case PoleLocation::outside: return "outside";
    }
    return "unknown";
}

double ReflectionDiff::min_over_components() const
{
    double m = kInf;
    for (double v : minima)
        m = std::min(m, v);
    return m;
}

ReflectionDiff reflection_diff(const FieldStack& stack, const HalfGridPlane& plane)
{
    if (!stack.grid)
        throw std::invalid_argument("field stack has no grid");
    const Grid& grid = *stack.grid;
    CapLayout layout = cap_layout(grid, plane);

    ReflectionDiff d;
    d.plane = plane;
    d.excluded = layout.excluded;
    d.pole_location = layout.pole_location;
    d.nodes = std::move(layout.nodes);
    d.values.assign(stack.m(), std::vector<double>(d.nodes.size()));
    d.minima.assign(stack.m(), kInf);
    d.argmin.assign(stack.m(), NodeIndex{});

    for (std::size_t c = 0; c < stack.m(); ++c) {
        for (std::size_t k = 0; k < d.nodes.size(); ++k) {
            const std::size_t u = d.nodes[k];
            const NodeIndex n = grid.node(u);
            // Nodes on T_lambda are their own mirror images.
            const double v = plane.reflect_i(n.i) == n.i
                                 ? 0.0
                                 : reflected_value(stack, c, n, plane) - stack.components[c][u];
            d.values[c][k] = v;
            if (v < d.minima[c]) {
                d.minima[c] = v;
                d.argmin[c] = n;
            }
        }
    }
    return d;
}

ReflectionDiff reflection_diff(const FieldStack& stack, double lambda)
{
    return reflection_diff(stack, HalfGridPlane::from_lambda(lambda, stack.grid->h()));
}

CField compute_c(const FieldStack& stack, const HalfGridPlane& plane, const NonlinearitySpec& f)
{
    const Grid& grid = *stack.grid;
    CapLayout layout = cap_layout(grid, plane);
    const double L = f.lipschitz();

    CField out;
    out.nodes = std::move(layout.nodes);
    out.values.reserve(out.nodes.size());
    out.min = kInf;
    out.max = -kInf;
    const auto& u1 = stack.components.at(0);
    for (std::size_t u : out.nodes) {
        const NodeIndex n = grid.node(u);
        const double here = u1[u];
        const double there = reflected_value(stack, 0, n, plane);
        const double c = std::abs(there - here) > kZeroDiff ? f.difference_quotient(here, there)
                                                            : f.slope(here);
        if (c < -kCSlack || c > L + kCSlack)
            throw std::domain_error(fmt::format(
                "c(x, lambda) = {:.17g} at node ({}, {}) lies outside [0, {}]", c, n.i, n.j, L));
        out.values.push_back(c);
        out.min = std::min(out.min, c);
        out.max = std::max(out.max, c);
    }
    if (out.values.empty())
        out.min = out.max = 0.0;
    return out;
}

CField compute_c(const FieldStack& stack, double lambda, const NonlinearitySpec& f)
{
    return compute_c(stack, HalfGridPlane::from_lambda(lambda, stack.grid->h()), f);
}

Matrix cooperativity_matrix(const AlphaVector& alpha, double c_value)
{
    if (!(c_value >= 0.0))
        throw std::invalid_argument(fmt::format("coupling c = {} must be nonnegative", c_value));
    if (!alpha.all_nonnegative())
        throw std::invalid_argument("shifts must be nonnegative");
    const std::size_t m = alpha.size();
    if (m == 1)
        return {{c_value - alpha[0]}};

    Matrix a(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        a[i][i] = -alpha[i];
        if (i + 1 < m)
            a[i][i + 1] = 1.0;
    }
    a[m - 1][0] = c_value;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j && a[i][j] < 0.0)
                throw std::logic_error("negative off-diagonal coupling");
        }
    }
    return a;
}

double default_positivity_tol(const FieldStack& stack)
{
    return 1e-8 * stack.sup_norm(0);
}

namespace {

MovingPlaneReport sweep_over(const FieldStack& stack, std::vector<HalfGridPlane> planes, double tol,
                             const NonlinearitySpec* f)
{
    std::ranges::sort(planes, std::greater<>{}, &HalfGridPlane::half_index);

    MovingPlaneReport rep;
    rep.tolerance = tol;
    rep.coeff_signs_nonnegative = all_nonnegative_signs(stack.alpha);
    rep.shifts_nonnegative = stack.alpha.all_nonnegative();
    rep.symmetry_defect = symmetry_defect(stack);
    rep.monotonicity_defect = monotonicity_defect(stack);
    if (f)
        rep.lipschitz = f->lipschitz();

    bool prefix_ok = true;
    for (const HalfGridPlane& plane : planes) {
        const ReflectionDiff d = reflection_diff(stack, plane);
        SweepEntry e;
        e.lambda = plane.lambda();
        e.half_index = plane.half_index;
        e.cap_size = d.nodes.size();
        e.minima = d.minima;
        e.argmin = d.argmin;
        e.pole_location = d.pole_location;
        e.pole_excluded = d.excluded.has_value();
        e.passed = d.min_over_components() >= -tol;
        if (f) {
            const CField c = compute_c(stack, plane, *f);
            if (!c.values.empty()) {
                e.c_min = c.min;
                e.c_max = c.max;
                rep.c_min = std::min(rep.c_min.value_or(kInf), c.min);
                rep.c_max = std::max(rep.c_max.value_or(-kInf), c.max);
            }
        }
        if (!e.passed && !rep.first_violation)
            rep.first_violation = e.lambda;
        prefix_ok = prefix_ok && e.passed;
        if (prefix_ok)
            rep.mu_hat = e.lambda;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace

MovingPlaneReport sweep_mu(const FieldStack& stack, double tol, const NonlinearitySpec* f)
{
    const double h = stack.grid->h();
    const int top = static_cast<int>(std::ceil(2.0 / h - 1e-9)) - 1;  // lambda = 1 - h/2
    std::vector<HalfGridPlane> planes;
    for (int k = top; k >= 0; --k)
        planes.push_back({k, h});
    return sweep_over(stack, std::move(planes), tol, f);
}

MovingPlaneReport sweep_planes(const FieldStack& stack, std::span<const double> lambdas, double tol,
                               const NonlinearitySpec* f)
{
    std::vector<HalfGridPlane> planes;
    for (double l : lambdas)
        planes.push_back(HalfGridPlane::from_lambda(l, stack.grid->h()));
    return sweep_over(stack, std::move(planes), tol, f);
}

double symmetry_defect(const FieldStack& stack)
{
    const Grid& g = *stack.grid;
    double defect = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto mirror = g.mirror_unknown(u);
        for (const auto& comp : stack.components) {
            const double other = mirror ? comp[*mirror] : 0.0;
            defect = std::max(defect, std::abs(comp[u] - other));
        }
    }
    return defect;
}

double monotonicity_defect(const FieldStack& stack, double min_x1)
{
    const Grid& g = *stack.grid;
    const auto& u1 = stack.components.at(0);
    double defect = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const NodeIndex n = g.node(u);
        if (n.i < 0 || g.coords(n).x1 < min_x1)
            continue;
        if (auto next = g.unknown(n.i + 1, n.j))
            defect = std::max(defect, (u1[*next] - u1[u]) / g.h());
    }
    return defect;
}

double barrier_expression(double a, double K, double rho, int n)
{
    const double L = -std::log(rho);
    const double r2 = rho * rho;
    return -a * std::pow(L, a - 1.0) * (n - 2) / r2 + a * (a - 1.0) * std::pow(L, a - 2.0) / r2 +
           K * std::pow(L, a);
}

BarrierReport barrier_check(double a, double r, double K, int n_samples)
{
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument(fmt::format("barrier exponent a = {} must lie in (0, 1)", a));
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument(fmt::format("barrier radius r = {} must lie in (0, 1)", r));
    if (!(K >= 0.0))
        throw std::invalid_argument("barrier constant K must be nonnegative");
    if (n_samples < 2)
        throw std::invalid_argument("barrier check needs at least 2 samples");
    constexpr double kSmallest = 1e-8;
    if (r <= kSmallest)
        throw std::invalid_argument("barrier radius must exceed the smallest sample radius 1e-8");

    BarrierReport rep{a, r, K, {}, {}, 0.0};
    const double lo = std::log(kSmallest);
    const double hi = std::log(r);
    bool ok = true;
    for (int k = 0; k < n_samples; ++k) {
        const double rho = k + 1 == n_samples ? r : std::exp(lo + (hi - lo) * k / (n_samples - 1));
        const double v = barrier_expression(a, K, rho);
        rep.radii.push_back(rho);
        rep.values.push_back(v);
        ok = ok && v <= 0.0;
        if (ok)
            rep.r_star = rho;
    }
    return rep;
}

double green_ball(Point pole, Point x, double radius)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("disc radius must be positive");
    const double r2 = radius * radius;
    const double tol = 1e-12 * r2;
    if (pole.x1 * pole.x1 + pole.x2 * pole.x2 >= r2)
        throw std::invalid_argument("pole must lie inside the disc");
    if (x.x1 * x.x1 + x.x2 * x.x2 > r2 + tol)
        throw std::invalid_argument("evaluation point lies outside the disc");
    const double dist = std::hypot(x.x1 - pole.x1, x.x2 - pole.x2);
    if (dist == 0.0)
        throw std::invalid_argument("Green function evaluated at its pole");

    constexpr double inv_2pi = 0.5 * std::numbers::inv_pi;
    const double pole_norm = std::hypot(pole.x1, pole.x2);
    if (pole_norm == 0.0)
        return inv_2pi * std::log(radius / dist);
    // |x - pole*| |pole| with pole* = radius^2 pole / |pole|^2.
    const double s = radius * radius / pole_norm;
    const double image = std::hypot(pole_norm * x.x1 - s * pole.x1, pole_norm * x.x2 - s * pole.x2);
    return inv_2pi * std::log(image / (radius * dist));
}

double green_harmonic_residual(const Grid& grid, double r_min, double radius)
{
    const double h2 = grid.h() * grid.h();
    const Point pole{0.0, 0.0};
    double worst = 0.0;
    for (const NodeIndex n : grid.nodes()) {
        const Point p = grid.coords(n);
        if (std::hypot(p.x1, p.x2) <= r_min)
            continue;
        if (!grid.is_interior(n.i + 1, n.j) || !grid.is_interior(n.i - 1, n.j) ||
            !grid.is_interior(n.i, n.j + 1) || !grid.is_interior(n.i, n.j - 1))
            continue;
        const auto g = [&](int di, int dj) { return green_ball(pole, grid.coords(n.i + di, n.j + dj), radius); };
        const double lap = (g(1, 0) + g(-1, 0) + g(0, 1) + g(0, -1) - 4.0 * g(0, 0)) / h2;
        worst = std::max(worst, std::abs(lap));
    }
    return worst;
}

MovingPlaneReport singular_profile_experiment(const Grid& grid, std::span<const double> lambdas,
                                              double radius)
{
    if (!grid.conforming())
        throw std::invalid_argument("singular profile experiment needs a conforming disc grid");
    auto shared = std::make_shared<Grid>(grid);
    shared->set_puncture({0.0, 0.0});
    if (!shared->puncture())
        throw std::invalid_argument("the origin is not an interior node of the grid");
    for (const NodeIndex n : shared->nodes()) {
        const Point p = shared->coords(n);
        if (p.x1 * p.x1 + p.x2 * p.x2 >= radius * radius)
            throw std::invalid_argument("grid node outside the disc");
    }
    const auto profile = [radius](Point p) {
        if (p.x1 == 0.0 && p.x2 == 0.0)
            return kInf;
        return green_ball({0.0, 0.0}, p, radius);
    };
    const FieldStack stack =
        FieldStack::from_functions(shared, AlphaVector({0.0}), {profile});

    std::vector<HalfGridPlane> planes;
    for (double l : lambdas)
        planes.push_back(HalfGridPlane::from_lambda(l, shared->h()));
    std::ranges::sort(planes, std::greater<>{}, &HalfGridPlane::half_index);

    MovingPlaneReport rep;
    rep.coeff_signs_nonnegative = rep.shifts_nonnegative = true;
    bool prefix_ok = true;
    for (const HalfGridPlane& plane : planes) {
        const ReflectionDiff d = reflection_diff(stack, plane);
        SweepEntry e;
        e.lambda = plane.lambda();
        e.half_index = plane.half_index;
        e.cap_size = d.nodes.size();
        e.minima = d.minima;
        e.argmin = d.argmin;
        e.pole_location = d.pole_location;
        e.pole_excluded = d.excluded.has_value();
        // Strict positivity for lambda > 0; on T_0 the profile is radial and V vanishes.
        e.passed = plane.half_index > 0 ? d.min_over_components() > 0.0
                                        : std::abs(d.min_over_components()) <= 1e-12 || d.nodes.empty();
        if (!e.passed && !rep.first_violation)
            rep.first_violation = e.lambda;
        prefix_ok = prefix_ok && e.passed;
        if (prefix_ok)
            rep.mu_hat = e.lambda;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

void write_sweep_csv(std::ostream& os, const MovingPlaneReport& report)
{
    os << "lambda,component,min_v,argmin_i,argmin_j\n";
    for (const auto& e : report.entries) {
        for (std::size_t c = 0; c < e.minima.size(); ++c) {
            if (e.cap_size == 0)
                fmt::print(os, "{:.17g},{},inf,,\n", e.lambda, c + 1);
            else
                fmt::print(os, "{:.17g},{},{:.17g},{},{}\n", e.lambda, c + 1, e.minima[c],
                           e.argmin[c].i, e.argmin[c].j);
        }
    }
}

void write_plot_data(std::ostream& os, const MovingPlaneReport& report)
{
    os << "# lambda min_v\n";
    for (const auto& e : report.entries) {
        if (e.cap_size == 0)
            continue;
        const double m = *std::ranges::min_element(e.minima);
        fmt::print(os, "{:.17g} {:.17g}\n", e.lambda, m);
    }
}

void write_report(std::ostream& os, const MovingPlaneReport& r)
{
    fmt::print(os, "sweep.tolerance = {:.6e}\n", r.tolerance);
    fmt::print(os, "sweep.planes = {}\n", r.entries.size());
    if (r.mu_hat)
        fmt::print(os, "sweep.mu_hat = {:.17g}\n", *r.mu_hat);
    else
        fmt::print(os, "sweep.mu_hat = sweep failed\n");
    if (r.first_violation)
        fmt::print(os, "sweep.first_violating_lambda = {:.17g}\n", *r.first_violation);
    else
        fmt::print(os, "sweep.first_violating_lambda = none\n");
    fmt::print(os, "sweep.symmetry_defect = {:.6e}\n", r.symmetry_defect);
    fmt::print(os, "sweep.monotonicity_defect = {:.6e}\n", r.monotonicity_defect);
    if (r.c_min && r.c_max)
        fmt::print(os, "sweep.c_range = [{:.17g}, {:.17g}] (lipschitz {})\n", *r.c_min, *r.c_max,
                   r.lipschitz);
    std::size_t inside = 0, band = 0, outside = 0;
    for (const auto& e : r.entries) {
        switch (e.pole_location) {
        case PoleLocation::inside: ++inside; break;
        case PoleLocation::staircase_band: ++band; break;
        case PoleLocation::outside: ++outside; break;
        }
    }
    fmt::print(os, "sweep.pole_image = inside {}, staircase-band {}, outside {}\n", inside, band, outside);
}

void write_report(std::ostream& os, const BarrierReport& r)
{
    fmt::print(os, "barrier.a = {}\n", r.a);
    fmt::print(os, "barrier.r = {}\n", r.r);
    fmt::print(os, "barrier.K = {}\n", r.K);
    fmt::print(os, "barrier.samples = {}\n", r.radii.size());
    fmt::print(os, "barrier.r_star = {:.17g}\n", r.r_star);
    fmt::print(os, "barrier.found = {}\n", r.found());
}

}  // namespace mplab
