#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mplab/geometry.hpp"

using namespace mplab;

namespace {

// Independent count of lattice points strictly inside the unit disc.
std::size_t count_disc_nodes(int n_cells)
{
    std::size_t count = 0;
    for (int i = -n_cells; i <= n_cells; ++i)
        for (int j = -n_cells; j <= n_cells; ++j)
            if (i * i + j * j < n_cells * n_cells)
                ++count;
    return count;
}

}  // namespace

TEST_CASE("validate_domain: conforming catalog passes")
{
    for (const DomainSpec& d : {DomainSpec::disc(), DomainSpec::ellipse(1.0, 0.6),
                                DomainSpec::stadium(0.5, 0.5), DomainSpec::lens(1.0)}) {
        const DomainValidation v = validate_domain(d);
        CAPTURE(to_string(d.shape));
        CHECK(v.all_passed());
    }
    CHECK(DomainSpec::stadium(0.5, 0.5).sup_x1() == 1.0);
}

TEST_CASE("validate_domain: shifted disc fails symmetry with a witness")
{
    const DomainValidation v = validate_domain(DomainSpec::shifted_disc({0.3, 0.0}));
    const CheckResult* sym = v.find("x1_symmetric");
    REQUIRE(sym != nullptr);
    CHECK_FALSE(sym->passed);
    REQUIRE(sym->witness.has_value());
    const auto spec = DomainSpec::shifted_disc({0.3, 0.0});
    const Point w = *sym->witness;
    CHECK(spec.contains(w) != spec.contains({-w.x1, w.x2}));
    CHECK(v.find("x1_convex")->passed);
    CHECK_FALSE(v.find("sup_x1_is_one")->passed);
}

TEST_CASE("validate_domain: missing singular point and convexity failures")
{
    DomainSpec d = DomainSpec::disc();
    d.singular_point = {2.0, 0.0};
    CHECK_FALSE(validate_domain(d).find("singular_point_inside")->passed);

    // Annulus: not x1-convex on the scanline x2 = 0.
    const auto annulus = [](Point p) {
        const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
        return r2 < 1.0 && r2 > 0.25;
    };
    const CheckResult c = check_x1_convexity(annulus, {-1, 1, -1, 1}, 201);
    CHECK_FALSE(c.passed);
    REQUIRE(c.witness);
    CHECK(annulus(*c.witness));
}

TEST_CASE("build_grid: disc node count matches lattice enumeration")
{
    for (int n : {8, 16, 33}) {
        const Grid g = build_grid(DomainSpec::disc(), n);
        CHECK(g.size() == count_disc_nodes(n));
        CHECK(g.h() == 1.0 / n);
    }
    CHECK_THROWS_AS(build_grid(DomainSpec::disc(), 4), std::invalid_argument);
}

TEST_CASE("build_grid: conforming grids are mirror symmetric, the control is not")
{
    for (const DomainSpec& d : {DomainSpec::disc(), DomainSpec::ellipse(1.0, 0.6),
                                DomainSpec::stadium(0.5, 0.5), DomainSpec::lens(0.7)}) {
        const Grid g = build_grid(d, 24);
        CHECK(g.conforming());
        CHECK(g.node_set_mirror_symmetric());
        const auto left = std::ranges::count_if(g.nodes(), [](NodeIndex n) { return n.i < 0; });
        const auto right = std::ranges::count_if(g.nodes(), [](NodeIndex n) { return n.i > 0; });
        CHECK(left == right);
        for (std::size_t u = 0; u < g.size(); ++u)
            CHECK(g.mirror_unknown(u).has_value());
    }
    const Grid control = build_grid(DomainSpec::shifted_disc({0.3, 0.0}), 20);
    CHECK_FALSE(control.conforming());
    CHECK_FALSE(control.node_set_mirror_symmetric());
}

TEST_CASE("build_grid: classification and exact coordinates")
{
    const Grid g = build_grid(DomainSpec::disc(), 8);
    CHECK(g.classify(0, 0) == NodeClass::interior);
    CHECK(g.classify(8, 0) == NodeClass::boundary);  // on the circle: not strictly inside
    CHECK(g.classify(7, 7) == NodeClass::exterior);
    CHECK(g.coords(3, -2) == Point{3 * 0.125, -2 * 0.125});
    REQUIRE(g.puncture());
    CHECK(g.node(*g.puncture()) == NodeIndex{0, 0});
    for (const NodeIndex n : g.nodes()) {
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
            CHECK(g.classify(n.i + di, n.j + dj) != NodeClass::exterior);
    }
    std::ostringstream os;
    g.write_csv(os);
    CHECK(os.str().rfind("i,j,x1,x2,class\n", 0) == 0);
}

TEST_CASE("reflect")
{
    CHECK(reflect({0.6, 0.2}, 0.5).x1 == doctest::Approx(0.4));
    CHECK(reflect({0.6, 0.2}, 0.5).x2 == 0.2);
    CHECK(reflect({0.37, -1.0}, 0.37) == Point{0.37, -1.0});
    const Point o = reflect({0.0, 0.0}, 0.6);
    CHECK(o.x1 == doctest::Approx(1.2));
    CHECK_FALSE(DomainSpec::disc().contains(o));
    for (double x : {-0.75, 0.125, 0.5, 3.0})
        for (double lambda : {0.0, 0.25, 0.5})
            CHECK(reflect(reflect({x, 0.3}, lambda), lambda) == Point{x, 0.3});
}

TEST_CASE("cap_nodes")
{
    const Grid g = build_grid(DomainSpec::disc(), 10);
    const double h = g.h();

    const auto at_zero = cap_nodes(g, 0.0);
    const auto column0 = std::ranges::count_if(g.nodes(), [](NodeIndex n) { return n.i == 0; });
    CHECK(at_zero.size() == (g.size() - static_cast<std::size_t>(column0)) / 2);

    const auto rim = cap_nodes(g, 1.0 - h / 2);
    for (std::size_t u : rim)
        CHECK(g.node(u).i == 10);
    CHECK(rim.empty());  // (10, 0) lies on the circle

    CHECK_THROWS_AS(cap_nodes(g, 0.37), std::invalid_argument);
    CHECK_THROWS_AS(cap_nodes(g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cap_nodes(g, -0.05), std::invalid_argument);
}

TEST_CASE("cap_nodes: nested caps and node-exact reflection into the domain")
{
    for (const DomainSpec& d : {DomainSpec::disc(), DomainSpec::ellipse(1.0, 0.5),
                                DomainSpec::stadium(0.5, 0.5), DomainSpec::lens(1.5)}) {
        const Grid g = build_grid(d, 20);
        std::vector<std::size_t> previous;
        for (int k = 39; k >= 0; --k) {
            const HalfGridPlane plane{k, g.h()};
            const auto cap = cap_nodes(g, plane);
            CHECK(std::ranges::includes(cap, previous));
            for (std::size_t u : cap) {
                const NodeIndex n = g.node(u);
                CHECK(g.is_interior(plane.reflect_i(n.i), n.j));
            }
            previous = cap;
        }
    }
}
