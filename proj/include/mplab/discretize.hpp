#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "mplab/geometry.hpp"

namespace mplab {

/// Five-point discretization of (-Delta + shift) with homogeneous Dirichlet
/// data, stored in compressed rows over the grid's interior unknowns.
class SparseOperator {
public:
    SparseOperator(std::size_t dim, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols,
                   std::vector<double> values, double shift);

    std::size_t dim() const noexcept { return dim_; }
    double shift() const noexcept { return shift_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> cols() const noexcept { return cols_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Entry (row, col), zero when outside the sparsity pattern.
    double at(std::size_t row, std::size_t col) const;

    double diagonal(std::size_t row) const { return at(row, row); }

    /// Coordinate-format text, one "row col value" triple per line.
    void write_coordinate(std::ostream& os) const;

private:
    std::size_t dim_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
    double shift_;
};

/// Diagonal 4/h^2 + shift, -1/h^2 per interior neighbor; boundary neighbors
/// drop out. Throws for negative shifts.
SparseOperator assemble(const Grid& grid, double shift);

std::vector<double> apply(const SparseOperator& op, std::span<const double> x);
void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y);

}  // namespace mplab
