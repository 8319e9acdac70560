#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mplab/geometry.hpp"
#include "mplab/nonlinearity.hpp"
#include "mplab/solver.hpp"
#include "mplab/symcoeffs.hpp"

namespace mplab {

/// Where the reflected singular point 0_lambda falls relative to the staircase domain.
enum class PoleLocation { inside, staircase_band, outside };

std::string to_string(PoleLocation loc);

/// v_i(x) = u_i(x_lambda) - u_i(x) on the discrete cap right of T_lambda.
struct ReflectionDiff {
    HalfGridPlane plane;
    std::vector<std::size_t> nodes;  // cap unknowns, reflected puncture removed
    std::vector<std::vector<double>> values;  // [component][cap position]
    std::vector<double> minima;  // +inf on an empty cap
    std::vector<NodeIndex> argmin;
    std::optional<NodeIndex> excluded;  // node whose mirror image is the puncture
    PoleLocation pole_location = PoleLocation::outside;

    double lambda() const noexcept { return plane.lambda(); }
    double min_over_components() const;
};

/// Reflected values are looked up node-exactly. A reflected node outside the
/// staircase domain is an error on conforming grids and reads as the
/// Dirichlet value 0 on non-conforming ones.
ReflectionDiff reflection_diff(const FieldStack& stack, const HalfGridPlane& plane);
ReflectionDiff reflection_diff(const FieldStack& stack, double lambda);

struct CField {
    std::vector<std::size_t> nodes;
    std::vector<double> values;
    double min = 0.0;
    double max = 0.0;
};

/// c(x, lambda) = (f(u_1(x_lambda)) - f(u_1(x))) / v_1(x), falling back to the
/// one-sided slope of f where |v_1| <= 1e-12. Throws std::domain_error when a
/// value leaves [-1e-9, L + 1e-9].
CField compute_c(const FieldStack& stack, const HalfGridPlane& plane, const NonlinearitySpec& f);
CField compute_c(const FieldStack& stack, double lambda, const NonlinearitySpec& f);

using Matrix = std::vector<std::vector<double>>;

/// Coupling matrix of the reflected system: -alpha on the diagonal, 1 on the
/// superdiagonal, c in the bottom-left corner. For m = 1 it is [c - alpha_1].
Matrix cooperativity_matrix(const AlphaVector& alpha, double c_value);

struct SweepEntry {
    double lambda = 0.0;
    int half_index = 0;
    std::size_t cap_size = 0;
    std::vector<double> minima;
    std::vector<NodeIndex> argmin;
    PoleLocation pole_location = PoleLocation::outside;
    bool pole_excluded = false;
    bool passed = false;
    std::optional<double> c_min;
    std::optional<double> c_max;
};

struct MovingPlaneReport {
    double tolerance = 0.0;
    std::vector<SweepEntry> entries;  // descending lambda
    std::optional<double> mu_hat;  // empty: the very first plane already failed
    std::optional<double> first_violation;  // largest violating lambda
    double symmetry_defect = 0.0;
    double monotonicity_defect = 0.0;
    bool coeff_signs_nonnegative = false;
    bool shifts_nonnegative = false;
    std::optional<double> c_min;
    std::optional<double> c_max;
    double lipschitz = 0.0;

    bool mu_is_zero() const { return mu_hat && *mu_hat == 0.0; }
};

/// Positivity tolerance 1e-8 * |u_1|_inf.
double default_positivity_tol(const FieldStack& stack);

/// Descends lambda = 1 - h/2, 1 - h, ..., 0 and records the minima of V_lambda.
/// mu_hat is the smallest lambda such that every plane at or above it passes
/// min >= -tol. With f given, c(x, lambda) is evaluated on every cap as well.
MovingPlaneReport sweep_mu(const FieldStack& stack, double tol,
                           const NonlinearitySpec* f = nullptr);

/// Same bookkeeping over an explicit list of planes (sorted into descending order).
MovingPlaneReport sweep_planes(const FieldStack& stack, std::span<const double> lambdas, double tol,
                               const NonlinearitySpec* f = nullptr);

/// max_i max_x |u_i(x) - u_i(-x1, x2)|; nodes mirrored outside the domain read 0.
double symmetry_defect(const FieldStack& stack);

/// Largest positive forward difference (u_1(i+1, j) - u_1(i, j)) / h over
/// interior pairs with x1 >= min_x1. Zero means u_1 is nonincreasing in x1.
double monotonicity_defect(const FieldStack& stack, double min_x1 = 0.0);

/// Delta h + K h for h(x) = (-ln|x|)^a at radius rho in dimension n.
double barrier_expression(double a, double K, double rho, int n = 2);

struct BarrierReport {
    double a = 0.0;
    double r = 0.0;
    double K = 0.0;
    std::vector<double> radii;
    std::vector<double> values;
    double r_star = 0.0;  // 0 when the smallest sample already fails
    bool found() const noexcept { return r_star > 0.0; }
};

/// Samples the planar barrier expression at n_samples radii log-spaced on
/// [1e-8, r] and reports the largest sampled radius below which every sample
/// is nonpositive.
BarrierReport barrier_check(double a, double r, double K, int n_samples = 2000);

/// Green function of the Laplacian on the disc of the given radius centred at
/// the origin, positive inside and zero on the circle:
/// (1/2pi) ln(|x - pole*| |pole| / (radius |x - pole|)).
double green_ball(Point pole, Point x, double radius = 1.0);

/// Max |five-point Laplacian of G(0, .)| over interior nodes with |x| > r_min
/// whose four neighbours are interior.
double green_harmonic_residual(const Grid& grid, double r_min, double radius = 1.0);

/// u_1 = G(0, .) injected on a disc grid (the pole node carries +inf and is
/// only ever read through the excluded node). Reports V_lambda over the planes.
MovingPlaneReport singular_profile_experiment(const Grid& grid, std::span<const double> lambdas,
                                              double radius = 1.0);

void write_sweep_csv(std::ostream& os, const MovingPlaneReport& report);
void write_plot_data(std::ostream& os, const MovingPlaneReport& report);
void write_report(std::ostream& os, const MovingPlaneReport& report);
void write_report(std::ostream& os, const BarrierReport& report);

}  // namespace mplab
