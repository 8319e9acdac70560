#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mplab/discretize.hpp"

using namespace mplab;

namespace {

Grid single_node_grid()
{
    return Grid(1.0, 2, -2, 2, [](Point p) { return p.x1 == 0.0 && p.x2 == 0.0; }, true);
}

Grid strip_grid()
{
    return Grid(1.0, 3, -2, 2, [](Point p) { return (p.x1 == 0.0 || p.x1 == 1.0) && p.x2 == 0.0; }, false);
}

double quadratic(Point p)
{
    return 1.0 + p.x1 - 2.0 * p.x2 + 3.0 * p.x1 * p.x1 - p.x1 * p.x2 + 0.5 * p.x2 * p.x2;
}
constexpr double kMinusLaplacianOfQuadratic = -(6.0 + 1.0);

}  // namespace

TEST_CASE("assemble: single node and two-node strip")
{
    const SparseOperator one = assemble(single_node_grid(), 0.0);
    CHECK(one.dim() == 1);
    CHECK(one.at(0, 0) == 4.0);

    const SparseOperator two = assemble(strip_grid(), 0.0);
    REQUIRE(two.dim() == 2);
    CHECK(two.at(0, 0) == 4.0);
    CHECK(two.at(0, 1) == -1.0);
    CHECK(two.at(1, 0) == -1.0);
    CHECK(two.at(1, 1) == 4.0);
}

TEST_CASE("assemble: shift acts on the diagonal only")
{
    const Grid g = build_grid(DomainSpec::disc(), 12);
    const SparseOperator a0 = assemble(g, 0.0);
    const SparseOperator a3 = assemble(g, 3.0);
    REQUIRE(a0.nonzeros() == a3.nonzeros());
    for (std::size_t r = 0; r < g.size(); ++r)
        CHECK(a3.diagonal(r) - a0.diagonal(r) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(assemble(g, -0.1), std::invalid_argument);
}

TEST_CASE("assemble: symmetric M-matrix structure")
{
    const Grid g = build_grid(DomainSpec::ellipse(1.0, 0.6), 16);
    const SparseOperator a = assemble(g, 1.5);
    for (std::size_t r = 0; r < a.dim(); ++r) {
        for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            const std::size_t c = a.cols()[k];
            CHECK(a.at(c, r) == a.values()[k]);
            if (c != r)
                CHECK(a.values()[k] < 0.0);
        }
    }
}

TEST_CASE("apply")
{
    const SparseOperator one = assemble(single_node_grid(), 0.0);
    CHECK(mplab::apply(one, std::vector<double>{2.0}) == std::vector<double>{8.0});

    const Grid g = build_grid(DomainSpec::stadium(0.5, 0.5), 16);
    const SparseOperator a = assemble(g, 0.0);
    const std::vector<double> zero(g.size(), 0.0);
    CHECK(mplab::apply(a, zero) == zero);
    CHECK_THROWS_AS(mplab::apply(a, std::vector<double>(3, 1.0)), std::invalid_argument);

    // A mirror-symmetric input gives a mirror-symmetric output.
    std::vector<double> sym(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) {
        const Point p = g.coords(g.node(u));
        sym[u] = std::cos(p.x1) + p.x2 * p.x2 * p.x2;
    }
    const auto out = mplab::apply(a, sym);
    // Rows are sums of O(1/h^2) terms taken in mirrored order; allow rounding at that scale.
    const double scale = 8.0 / (g.h() * g.h()) * 2.0;
    for (std::size_t u = 0; u < g.size(); ++u)
        CHECK(std::abs(out[u] - out[*g.mirror_unknown(u)]) <= 1e-14 * scale);
}

TEST_CASE("apply: exact on quadratics away from the boundary")
{
    const Grid g = build_grid(DomainSpec::disc(), 32);
    for (double shift : {0.0, 2.5}) {
        const SparseOperator a = assemble(g, shift);
        std::vector<double> q(g.size());
        for (std::size_t u = 0; u < g.size(); ++u)
            q[u] = quadratic(g.coords(g.node(u)));
        const auto aq = mplab::apply(a, q);
        for (std::size_t u = 0; u < g.size(); ++u) {
            const NodeIndex n = g.node(u);
            if (!g.is_interior(n.i + 1, n.j) || !g.is_interior(n.i - 1, n.j) ||
                !g.is_interior(n.i, n.j + 1) || !g.is_interior(n.i, n.j - 1))
                continue;
            CHECK(std::abs(aq[u] - (kMinusLaplacianOfQuadratic + shift * q[u])) <= 1e-10);
        }
    }
}

TEST_CASE("write_coordinate")
{
    std::ostringstream os;
    assemble(strip_grid(), 0.0).write_coordinate(os);
    CHECK(os.str() == "% 2 2 4\n0 0 4\n0 1 -1\n1 0 -1\n1 1 4\n");
}
