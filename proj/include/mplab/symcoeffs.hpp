#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mplab {

/// Shift parameters (alpha_1, ..., alpha_m) of a product of shifted Laplacians
/// prod_i (-Delta + alpha_i). Always non-empty with finite entries.
class AlphaVector {
public:
    explicit AlphaVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_nonnegative() const noexcept;

private:
    std::vector<double> values_;
};

/// Coefficients s_0, ..., s_m of prod_i (alpha_i + t) in ascending powers of t.
/// s_m is exactly 1.
struct SymCoeffs {
    std::vector<double> coeffs;

    std::size_t degree() const noexcept { return coeffs.size() - 1; }
    double operator[](std::size_t k) const { return coeffs[k]; }
};

/// Expands prod_i (alpha_i + t) by repeated multiplication with a linear factor.
SymCoeffs expand_characteristic(const AlphaVector& alpha);

/// s_k(alpha): the elementary symmetric polynomial of degree m - k in alpha.
/// Uses direct subset summation for m <= 20 and the recurrence otherwise.
double symmetric_coefficient(const AlphaVector& alpha, std::size_t k);

/// Sum over all (m-k)-subsets of alpha of the product of their entries.
/// O(2^m); intended as the independent reference for expand_characteristic.
double subset_sum_coefficient(std::span<const double> alpha, std::size_t k);

/// True iff every s_k(alpha) >= 0 (exact comparison, no tolerance).
/// Equivalent to every alpha_i >= 0.
bool all_nonnegative_signs(const AlphaVector& alpha);

}  // namespace mplab
