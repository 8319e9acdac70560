#pragma once

#include <string>

namespace mplab {

/// Right-hand side f(u) of the semilinear problem, drawn from a small catalog
/// of globally Lipschitz maps.
struct NonlinearitySpec {
    enum class Kind { constant, affine, saturating, arctan };

    Kind kind = Kind::constant;
    double a = 0.0;  // constant value, or offset for the other kinds
    double b = 0.0;  // slope factor
    double cap = 0.0;  // saturation level M

    static NonlinearitySpec constant(double c) { return {Kind::constant, c, 0.0, 0.0}; }
    static NonlinearitySpec affine(double a, double b) { return {Kind::affine, a, b, 0.0}; }
    static NonlinearitySpec saturating(double a, double b, double cap)
    {
        return {Kind::saturating, a, b, cap};
    }
    static NonlinearitySpec arctan(double a, double b) { return {Kind::arctan, a, b, 0.0}; }

    /// Parses "constant 1.0", "affine 1 2", "saturating 0.5 3 10", "arctan 0 1".
    static NonlinearitySpec parse(const std::string& text);

    double operator()(double u) const;

    /// Closed-form Lipschitz constant: 0, b, b, b.
    double lipschitz() const;

    /// Right derivative of f at u.
    double slope(double u) const;

    /// (f(w) - f(u)) / (w - u), evaluated without cancellation. Requires w != u.
    double difference_quotient(double u, double w) const;

    std::string describe() const;
};

}  // namespace mplab
