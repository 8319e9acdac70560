#include "mplab/symcoeffs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mplab {

namespace {

constexpr std::size_t kSubsetOracleMaxSize = 20;

}  // namespace

AlphaVector::AlphaVector(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw std::invalid_argument("alpha must contain at least one shift");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("alpha[" + std::to_string(i) + "] is not finite");
    }
}

bool AlphaVector::all_nonnegative() const noexcept
{
    return std::ranges::all_of(values_, [](double a) { return a >= 0.0; });
}

SymCoeffs expand_characteristic(const AlphaVector& alpha)
{
    // coeffs holds prod_{i<=j} (alpha_i + t) after step j; multiply by (alpha_j + t) in place.
    std::vector<double> c(alpha.size() + 1, 0.0);
    c[0] = 1.0;
    std::size_t deg = 0;
    for (double a : alpha.values()) {
        c[deg + 1] = c[deg];
        for (std::size_t k = deg; k > 0; --k)
            c[k] = c[k - 1] + a * c[k];
        c[0] = a * c[0];
        ++deg;
    }
    return SymCoeffs{std::move(c)};
}

double subset_sum_coefficient(std::span<const double> alpha, std::size_t k)
{
    const std::size_t m = alpha.size();
    if (k > m)
        throw std::out_of_range("coefficient index exceeds number of shifts");
    if (m >= 63)
        throw std::invalid_argument("subset enumeration limited to fewer than 63 shifts");
    const std::size_t subset_size = m - k;
    double sum = 0.0;
    const std::uint64_t n_subsets = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < n_subsets; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != subset_size)
            continue;
        double prod = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::uint64_t{1} << i))
                prod *= alpha[i];
        }
        sum += prod;
    }
    return sum;
}

double symmetric_coefficient(const AlphaVector& alpha, std::size_t k)
{
    if (k > alpha.size())
        throw std::out_of_range("coefficient index " + std::to_string(k) + " exceeds m = " +
                                std::to_string(alpha.size()));
    if (alpha.size() <= kSubsetOracleMaxSize)
        return subset_sum_coefficient(alpha.values(), k);
    return expand_characteristic(alpha)[k];
}

bool all_nonnegative_signs(const AlphaVector& alpha)
{
    const SymCoeffs s = expand_characteristic(alpha);
    return std::ranges::all_of(s.coeffs, [](double c) { return c >= 0.0; });
}

}  // namespace mplab
