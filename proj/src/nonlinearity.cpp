#include "mplab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace mplab {

NonlinearitySpec NonlinearitySpec::parse(const std::string& text)
{
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    std::vector<double> p;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw std::invalid_argument("nonlinearity parameter '" + tok + "' is not a number");
        p.push_back(v);
    }
    const auto expect = [&](std::size_t n) {
        if (p.size() != n)
            throw std::invalid_argument(
                fmt::format("nonlinearity '{}' takes {} parameter(s), got {}", kind, n, p.size()));
    };
    if (kind == "constant") {
        expect(1);
        return constant(p[0]);
    }
    if (kind == "affine") {
        expect(2);
        return affine(p[0], p[1]);
    }
    if (kind == "saturating") {
        expect(3);
        return saturating(p[0], p[1], p[2]);
    }
    if (kind == "arctan") {
        expect(2);
        return arctan(p[0], p[1]);
    }
    throw std::invalid_argument("unknown nonlinearity kind '" + kind + "'");
}

double NonlinearitySpec::operator()(double u) const
{
    switch (kind) {
    case Kind::constant: return a;
    case Kind::affine: return a + b * u;
    case Kind::saturating: return a + b * std::min(u, cap);
    case Kind::arctan: return a + b * std::atan(u);
    }
    return 0.0;
}

double NonlinearitySpec::lipschitz() const
{
    return kind == Kind::constant ? 0.0 : std::abs(b);
}

double NonlinearitySpec::slope(double u) const
{
    switch (kind) {
    case Kind::constant: return 0.0;
    case Kind::affine: return b;
    case Kind::saturating: return u < cap ? b : 0.0;
    case Kind::arctan: return b / (1.0 + u * u);
    }
    return 0.0;
}

double NonlinearitySpec::difference_quotient(double u, double w) const
{
    if (u == w)
        throw std::invalid_argument("difference quotient needs distinct arguments");
    switch (kind) {
    case Kind::constant: return 0.0;
    case Kind::affine: return b;
    case Kind::saturating: {
        // min(., M) is 1-Lipschitz; same-side pairs give the exact ratio 1.
        if (u < cap && w < cap)
            return b;
        if (u >= cap && w >= cap)
            return 0.0;
        return b * (std::min(w, cap) - std::min(u, cap)) / (w - u);
    }
    case Kind::arctan: {
        const double d = w - u;
        const double denom = 1.0 + u * w;
        if (denom > 0.0)
            return b * std::atan(d / denom) / d;
        return b * (std::atan(w) - std::atan(u)) / d;
    }
    }
    return 0.0;
}

std::string NonlinearitySpec::describe() const
{
    switch (kind) {
    case Kind::constant: return fmt::format("constant {}", a);
    case Kind::affine: return fmt::format("affine {} {}", a, b);
    case Kind::saturating: return fmt::format("saturating {} {} {}", a, b, cap);
    case Kind::arctan: return fmt::format("arctan {} {}", a, b);
    }
    return "unknown";
}

}  // namespace mplab
