#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mplab {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

enum class Shape { disc, ellipse, stadium, lens, shifted_disc };

std::string to_string(Shape shape);
Shape parse_shape(const std::string& name);

/// Analytic planar domain. All lengths are normalized so that the domain
/// reaches x1 = 1 (except the shifted disc, which is a deliberately
/// non-conforming control).
struct DomainSpec {
    Shape shape = Shape::disc;
    double radius = 1.0;          // disc, shifted_disc
    Point center{};               // shifted_disc
    double semi_axis_x = 1.0;     // ellipse
    double semi_axis_y = 1.0;     // ellipse
    double half_length = 0.5;     // stadium: flat part spans |x1| <= half_length
    double cap_radius = 0.5;      // stadium
    double lens_offset = 1.0;     // lens: intersection of discs centered (0, +-d), radius sqrt(1+d^2)
    Point singular_point{};

    static DomainSpec disc(double radius = 1.0);
    static DomainSpec ellipse(double a, double b);
    static DomainSpec stadium(double half_length, double cap_radius);
    static DomainSpec lens(double offset);
    static DomainSpec shifted_disc(Point center, double radius = 1.0);

    bool negative_control() const noexcept { return shape == Shape::shifted_disc; }

    /// Strict membership in the open domain. Symmetric shapes evaluate x1
    /// only through |x1|, so x and its mirror image always agree bit for bit.
    bool contains(Point p) const;

    /// Exact sup of x1 over the domain.
    double sup_x1() const;

    struct Box {
        double x1_min, x1_max, x2_min, x2_max;
    };
    Box bounding_box() const;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    std::optional<Point> witness;
};

struct DomainValidation {
    std::vector<CheckResult> checks;

    bool all_passed() const;
    const CheckResult* find(const std::string& name) const;
};

/// Checks x1-convexity, x1-symmetry, interior singular point and sup x1 = 1.
/// Never throws on a failed check; the failing clause carries a witness point.
DomainValidation validate_domain(const DomainSpec& spec, int samples = 801);

/// Scanline interval test for an arbitrary membership predicate.
CheckResult check_x1_convexity(const std::function<bool(Point)>& inside, DomainSpec::Box box,
                               int samples);
CheckResult check_x1_symmetry(const std::function<bool(Point)>& inside, DomainSpec::Box box,
                              int samples);

Point reflect(Point x, double lambda) noexcept;

enum class NodeClass : std::uint8_t { exterior, boundary, interior };

char to_char(NodeClass c);
std::string to_string(NodeClass c);

struct NodeIndex {
    int i = 0;
    int j = 0;

    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// A plane T_lambda restricted to the half-grid lattice: lambda = half_index * h / 2.
/// Reflection about it maps node i to node half_index - i exactly.
struct HalfGridPlane {
    int half_index = 0;
    double h = 1.0;

    double lambda() const noexcept { return 0.5 * h * half_index; }
    int reflect_i(int i) const noexcept { return half_index - i; }

    /// Rejects lambda values that are not integer multiples of h/2.
    static HalfGridPlane from_lambda(double lambda, double h);
};

/// Uniform Cartesian grid with node (i, j) at (i*h, j*h). The index box is
/// symmetric in i, so the index mirror i -> -i is always available.
class Grid {
public:
    /// Classifies nodes of the box [-i_extent, i_extent] x [j_min, j_max] with
    /// `inside` (strict membership). Boundary nodes are non-interior nodes with
    /// an interior 4-neighbor; they carry homogeneous Dirichlet data.
    Grid(double h, int i_extent, int j_min, int j_max, const std::function<bool(Point)>& inside,
         bool conforming);

    double h() const noexcept { return h_; }
    int i_min() const noexcept { return -i_extent_; }
    int i_max() const noexcept { return i_extent_; }
    int j_min() const noexcept { return j_min_; }
    int j_max() const noexcept { return j_max_; }
    bool conforming() const noexcept { return conforming_; }

    bool in_box(int i, int j) const noexcept;
    NodeClass classify(int i, int j) const noexcept;
    bool is_interior(int i, int j) const noexcept { return classify(i, j) == NodeClass::interior; }

    Point coords(int i, int j) const noexcept { return {i * h_, j * h_}; }
    Point coords(NodeIndex n) const noexcept { return coords(n.i, n.j); }

    /// Number of interior nodes, i.e. unknowns.
    std::size_t size() const noexcept { return nodes_.size(); }
    NodeIndex node(std::size_t unknown) const { return nodes_[unknown]; }
    const std::vector<NodeIndex>& nodes() const noexcept { return nodes_; }

    /// Unknown index of an interior node, or nullopt otherwise.
    std::optional<std::size_t> unknown(int i, int j) const noexcept;

    /// Unknown index of the node (-i, j), or nullopt if it is not interior.
    std::optional<std::size_t> mirror_unknown(std::size_t unknown) const;

    /// Unknown index of the singular point when it coincides with an interior node.
    std::optional<std::size_t> puncture() const noexcept { return puncture_; }
    void set_puncture(Point p);

    bool node_set_mirror_symmetric() const;

    void write_csv(std::ostream& os) const;

private:
    std::size_t flat(int i, int j) const noexcept;

    double h_;
    int i_extent_;
    int j_min_;
    int j_max_;
    bool conforming_;
    std::vector<NodeClass> classes_;
    std::vector<std::int64_t> unknown_of_;
    std::vector<NodeIndex> nodes_;
    std::optional<std::size_t> puncture_;
};

/// Grid with h = 1 / n_cells covering the domain's bounding box.
Grid build_grid(const DomainSpec& spec, int n_cells);

/// Interior nodes strictly right of T_lambda (the discrete cap), in unknown order.
std::vector<std::size_t> cap_nodes(const Grid& grid, const HalfGridPlane& plane);
std::vector<std::size_t> cap_nodes(const Grid& grid, double lambda);

}  // namespace mplab
