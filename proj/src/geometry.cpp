#include "mplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mplab {

std::string to_string(Shape shape)
{
    switch (shape) {
    case Shape::disc: return "disc";
    case Shape::ellipse: return "ellipse";
    case Shape::stadium: return "stadium";
    case Shape::lens: return "lens";
    case Shape::shifted_disc: return "shifted-disc";
    }
    return "unknown";
}

Shape parse_shape(const std::string& name)
{
    for (Shape s : {Shape::disc, Shape::ellipse, Shape::stadium, Shape::lens, Shape::shifted_disc}) {
        if (to_string(s) == name)
            return s;
    }
    throw std::invalid_argument("unknown domain shape '" + name + "'");
}

DomainSpec DomainSpec::disc(double radius)
{
    DomainSpec d;
    d.shape = Shape::disc;
    d.radius = radius;
    return d;
}

DomainSpec DomainSpec::ellipse(double a, double b)
{
    DomainSpec d;
    d.shape = Shape::ellipse;
    d.semi_axis_x = a;
    d.semi_axis_y = b;
    return d;
}

DomainSpec DomainSpec::stadium(double half_length, double cap_radius)
{
    DomainSpec d;
    d.shape = Shape::stadium;
    d.half_length = half_length;
    d.cap_radius = cap_radius;
    return d;
}

DomainSpec DomainSpec::lens(double offset)
{
    DomainSpec d;
    d.shape = Shape::lens;
    d.lens_offset = offset;
    return d;
}

DomainSpec DomainSpec::shifted_disc(Point center, double radius)
{
    DomainSpec d;
    d.shape = Shape::shifted_disc;
    d.center = center;
    d.radius = radius;
    return d;
}

bool DomainSpec::contains(Point p) const
{
    const double ax = std::abs(p.x1);
    switch (shape) {
    case Shape::disc:
        return ax * ax + p.x2 * p.x2 < radius * radius;
    case Shape::ellipse: {
        const double u = ax / semi_axis_x;
        const double v = p.x2 / semi_axis_y;
        return u * u + v * v < 1.0;
    }
    case Shape::stadium: {
        if (ax <= half_length)
            return std::abs(p.x2) < cap_radius;
        const double dx = ax - half_length;
        return dx * dx + p.x2 * p.x2 < cap_radius * cap_radius;
    }
    case Shape::lens: {
        const double dy = std::abs(p.x2) + lens_offset;
        return ax * ax + dy * dy < 1.0 + lens_offset * lens_offset;
    }
    case Shape::shifted_disc: {
        const double dx = p.x1 - center.x1;
        const double dy = p.x2 - center.x2;
        return dx * dx + dy * dy < radius * radius;
    }
    }
    return false;
}

double DomainSpec::sup_x1() const
{
    switch (shape) {
    case Shape::disc: return radius;
    case Shape::ellipse: return semi_axis_x;
    case Shape::stadium: return half_length + cap_radius;
    case Shape::lens: return std::sqrt((1.0 + lens_offset * lens_offset) - lens_offset * lens_offset);
    case Shape::shifted_disc: return center.x1 + radius;
    }
    return 0.0;
}

DomainSpec::Box DomainSpec::bounding_box() const
{
    switch (shape) {
    case Shape::disc: return {-radius, radius, -radius, radius};
    case Shape::ellipse: return {-semi_axis_x, semi_axis_x, -semi_axis_y, semi_axis_y};
    case Shape::stadium: {
        const double w = half_length + cap_radius;
        return {-w, w, -cap_radius, cap_radius};
    }
    case Shape::lens: {
        const double half_height = std::sqrt(1.0 + lens_offset * lens_offset) - lens_offset;
        return {-1.0, 1.0, -half_height, half_height};
    }
    case Shape::shifted_disc:
        return {center.x1 - radius, center.x1 + radius, center.x2 - radius, center.x2 + radius};
    }
    return {0, 0, 0, 0};
}

bool DomainValidation::all_passed() const
{
    return std::ranges::all_of(checks, [](const CheckResult& c) { return c.passed; });
}

const CheckResult* DomainValidation::find(const std::string& name) const
{
    for (const auto& c : checks) {
        if (c.name == name)
            return &c;
    }
    return nullptr;
}

namespace {

// Sampling window symmetric in x1 with a small margin around the box.
struct Sampling {
    double x1_half, x2_lo, x2_hi;
    int samples;

    double x1(int k) const { return -x1_half + 2.0 * x1_half * k / (samples - 1); }
    double x2(int k) const { return x2_lo + (x2_hi - x2_lo) * k / (samples - 1); }
};

Sampling make_sampling(DomainSpec::Box box, int samples)
{
    if (samples < 3)
        throw std::invalid_argument("validation needs at least 3 samples per axis");
    const double half = 1.05 * std::max(std::abs(box.x1_min), std::abs(box.x1_max));
    const double pad = 0.05 * (box.x2_max - box.x2_min);
    return {half, box.x2_min - pad, box.x2_max + pad, samples};
}

}  // namespace

CheckResult check_x1_convexity(const std::function<bool(Point)>& inside, DomainSpec::Box box,
                               int samples)
{
    const Sampling s = make_sampling(box, samples);
    for (int b = 0; b < s.samples; ++b) {
        const double x2 = s.x2(b);
        bool seen_inside = false;
        bool left_again = false;
        for (int a = 0; a < s.samples; ++a) {
            const Point p{s.x1(a), x2};
            const bool in = inside(p);
            if (in && left_again) {
                return {"x1_convex", false,
                        fmt::format("scanline x2 = {:.6g} re-enters the domain", x2), p};
            }
            if (in)
                seen_inside = true;
            else if (seen_inside)
                left_again = true;
        }
    }
    return {"x1_convex", true, "every sampled scanline meets the domain in an interval", std::nullopt};
}

CheckResult check_x1_symmetry(const std::function<bool(Point)>& inside, DomainSpec::Box box,
                              int samples)
{
    const Sampling s = make_sampling(box, samples);
    for (int b = 0; b < s.samples; ++b) {
        for (int a = 0; a < s.samples; ++a) {
            const Point p{s.x1(a), s.x2(b)};
            const Point q{-p.x1, p.x2};
            if (inside(p) != inside(q)) {
                const Point witness = inside(p) ? p : q;
                return {"x1_symmetric", false,
                        fmt::format("({:.6g}, {:.6g}) is inside but its mirror is not", witness.x1,
                                    witness.x2),
                        witness};
            }
        }
    }
    return {"x1_symmetric", true, "membership agrees with its mirror at every sample", std::nullopt};
}

DomainValidation validate_domain(const DomainSpec& spec, int samples)
{
    const auto inside = [&spec](Point p) { return spec.contains(p); };
    const auto box = spec.bounding_box();

    DomainValidation report;
    report.checks.push_back(check_x1_convexity(inside, box, samples));
    report.checks.push_back(check_x1_symmetry(inside, box, samples));

    const bool has_point = spec.contains(spec.singular_point);
    report.checks.push_back(
        {"singular_point_inside", has_point,
         fmt::format("singular point ({:.6g}, {:.6g}) {}", spec.singular_point.x1,
                     spec.singular_point.x2, has_point ? "is interior" : "is not interior"),
         has_point ? std::nullopt : std::optional<Point>{spec.singular_point}});

    const double sup = spec.sup_x1();
    const bool normalized = std::abs(sup - 1.0) <= 1e-12;
    report.checks.push_back(
        {"sup_x1_is_one", normalized, fmt::format("sup x1 = {:.17g}", sup), std::nullopt});
    return report;
}

Point reflect(Point x, double lambda) noexcept
{
    return {2.0 * lambda - x.x1, x.x2};
}

char to_char(NodeClass c)
{
    switch (c) {
    case NodeClass::exterior: return 'E';
    case NodeClass::boundary: return 'B';
    case NodeClass::interior: return 'I';
    }
    return '?';
}

std::string to_string(NodeClass c)
{
    switch (c) {
    case NodeClass::exterior: return "exterior";
    case NodeClass::boundary: return "boundary";
    case NodeClass::interior: return "interior";
    }
    return "unknown";
}

HalfGridPlane HalfGridPlane::from_lambda(double lambda, double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("grid spacing must be positive");
    const double scaled = 2.0 * lambda / h;
    const double k = std::round(scaled);
    if (!std::isfinite(scaled) || std::abs(scaled - k) > 1e-9)
        throw std::invalid_argument(
            fmt::format("lambda = {} is not a multiple of h/2 = {}", lambda, 0.5 * h));
    return {static_cast<int>(k), h};
}

Grid::Grid(double h, int i_extent, int j_min, int j_max, const std::function<bool(Point)>& inside,
           bool conforming)
    : h_(h), i_extent_(i_extent), j_min_(j_min), j_max_(j_max), conforming_(conforming)
{
    if (!(h > 0.0) || i_extent < 0 || j_max < j_min)
        throw std::invalid_argument("invalid grid box");
    const std::size_t n = static_cast<std::size_t>(2 * i_extent + 1) *
                          static_cast<std::size_t>(j_max - j_min + 1);
    classes_.assign(n, NodeClass::exterior);
    unknown_of_.assign(n, -1);

    for (int j = j_min_; j <= j_max_; ++j) {
        for (int i = -i_extent_; i <= i_extent_; ++i) {
            if (inside(coords(i, j)))
                classes_[flat(i, j)] = NodeClass::interior;
        }
    }
    for (int j = j_min_; j <= j_max_; ++j) {
        for (int i = -i_extent_; i <= i_extent_; ++i) {
            if (classes_[flat(i, j)] != NodeClass::interior)
                continue;
            if (i == -i_extent_ || i == i_extent_ || j == j_min_ || j == j_max_)
                throw std::invalid_argument("interior node on the edge of the grid box");
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                auto& c = classes_[flat(i + di, j + dj)];
                if (c == NodeClass::exterior)
                    c = NodeClass::boundary;
            }
            unknown_of_[flat(i, j)] = static_cast<std::int64_t>(nodes_.size());
            nodes_.push_back({i, j});
        }
    }
}

std::size_t Grid::flat(int i, int j) const noexcept
{
    return static_cast<std::size_t>(j - j_min_) * static_cast<std::size_t>(2 * i_extent_ + 1) +
           static_cast<std::size_t>(i + i_extent_);
}

bool Grid::in_box(int i, int j) const noexcept
{
    return i >= -i_extent_ && i <= i_extent_ && j >= j_min_ && j <= j_max_;
}

NodeClass Grid::classify(int i, int j) const noexcept
{
    return in_box(i, j) ? classes_[flat(i, j)] : NodeClass::exterior;
}

std::optional<std::size_t> Grid::unknown(int i, int j) const noexcept
{
    if (!in_box(i, j))
        return std::nullopt;
    const std::int64_t u = unknown_of_[flat(i, j)];
    if (u < 0)
        return std::nullopt;
    return static_cast<std::size_t>(u);
}

std::optional<std::size_t> Grid::mirror_unknown(std::size_t unknown_index) const
{
    const NodeIndex n = nodes_.at(unknown_index);
    return unknown(-n.i, n.j);
}

void Grid::set_puncture(Point p)
{
    puncture_.reset();
    const double fi = p.x1 / h_;
    const double fj = p.x2 / h_;
    const double ri = std::round(fi);
    const double rj = std::round(fj);
    if (std::abs(fi - ri) <= 1e-9 && std::abs(fj - rj) <= 1e-9)
        puncture_ = unknown(static_cast<int>(ri), static_cast<int>(rj));
}

bool Grid::node_set_mirror_symmetric() const
{
    for (int j = j_min_; j <= j_max_; ++j) {
        for (int i = 1; i <= i_extent_; ++i) {
            if (classify(i, j) != classify(-i, j))
                return false;
        }
    }
    return true;
}

void Grid::write_csv(std::ostream& os) const
{
    os << "i,j,x1,x2,class\n";
    for (int j = j_min_; j <= j_max_; ++j) {
        for (int i = -i_extent_; i <= i_extent_; ++i) {
            const Point p = coords(i, j);
            fmt::print(os, "{},{},{:.17g},{:.17g},{}\n", i, j, p.x1, p.x2,
                       to_string(classify(i, j)));
        }
    }
}

Grid build_grid(const DomainSpec& spec, int n_cells)
{
    if (n_cells < 8)
        throw std::invalid_argument(fmt::format("n_cells must be at least 8 (got {})", n_cells));
    const double h = 1.0 / n_cells;
    const auto box = spec.bounding_box();
    const double half_width = std::max(std::abs(box.x1_min), std::abs(box.x1_max));
    const int i_extent = static_cast<int>(std::ceil(half_width / h)) + 1;
    const int j_min = static_cast<int>(std::floor(box.x2_min / h)) - 1;
    const int j_max = static_cast<int>(std::ceil(box.x2_max / h)) + 1;

    Grid grid(h, i_extent, j_min, j_max, [&spec](Point p) { return spec.contains(p); },
              !spec.negative_control());
    if (grid.size() < 4)
        throw std::invalid_argument(
            fmt::format("grid has only {} interior nodes (need at least 4)", grid.size()));
    grid.set_puncture(spec.singular_point);
    return grid;
}

std::vector<std::size_t> cap_nodes(const Grid& grid, const HalfGridPlane& plane)
{
    if (plane.half_index < 0 || !(plane.lambda() < 1.0))
        throw std::invalid_argument(fmt::format("lambda = {} outside [0, 1)", plane.lambda()));
    if (plane.h != grid.h())
        throw std::invalid_argument("plane and grid use different spacings");
    std::vector<std::size_t> cap;
    for (std::size_t u = 0; u < grid.size(); ++u) {
        if (2 * grid.node(u).i > plane.half_index)
            cap.push_back(u);
    }
    return cap;
}

std::vector<std::size_t> cap_nodes(const Grid& grid, double lambda)
{
    return cap_nodes(grid, HalfGridPlane::from_lambda(lambda, grid.h()));
}

}  // namespace mplab
