#include "mplab/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mplab {

SparseOperator::SparseOperator(std::size_t dim, std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> cols, std::vector<double> values,
                               double shift)
    : dim_(dim),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)),
      shift_(shift)
{
    if (row_ptr_.size() != dim_ + 1 || cols_.size() != values_.size() ||
        row_ptr_.back() != values_.size())
        throw std::invalid_argument("inconsistent compressed-row layout");
}

double SparseOperator::at(std::size_t row, std::size_t col) const
{
    if (row >= dim_ || col >= dim_)
        throw std::out_of_range("operator index out of range");
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col)
        return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseOperator::write_coordinate(std::ostream& os) const
{
    fmt::print(os, "% {} {} {}\n", dim_, dim_, values_.size());
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            fmt::print(os, "{} {} {:.17g}\n", r, cols_[k], values_[k]);
    }
}

SparseOperator assemble(const Grid& grid, double shift)
{
    if (!std::isfinite(shift) || shift < 0.0)
        throw std::invalid_argument(fmt::format("shift must be finite and >= 0 (got {})", shift));

    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const double diag = 4.0 * inv_h2 + shift;
    const std::size_t n = grid.size();

    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;
    std::vector<double> values;
    row_ptr.reserve(n + 1);
    cols.reserve(5 * n);
    values.reserve(5 * n);

    for (std::size_t row = 0; row < n; ++row) {
        const NodeIndex node = grid.node(row);
        // Natural ordering: the -j, -i, centre, +i, +j entries are already column-sorted.
        const std::size_t start = cols.size();
        for (auto [di, dj] : {std::pair{0, -1}, {-1, 0}, {0, 0}, {1, 0}, {0, 1}}) {
            if (di == 0 && dj == 0) {
                cols.push_back(row);
                values.push_back(diag);
                continue;
            }
            if (auto col = grid.unknown(node.i + di, node.j + dj)) {
                cols.push_back(*col);
                values.push_back(-inv_h2);
            }
        }
        if (!std::is_sorted(cols.begin() + static_cast<std::ptrdiff_t>(start), cols.end()))
            throw std::logic_error("stencil columns out of order");
        row_ptr.push_back(cols.size());
    }

    // M-matrix structure: positive diagonal, nonpositive off-diagonals, weak diagonal dominance.
    for (std::size_t row = 0; row < n; ++row) {
        double off_sum = 0.0;
        double d = 0.0;
        for (std::size_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
            if (cols[k] == row) {
                d = values[k];
            } else {
                if (values[k] > 0.0)
                    throw std::logic_error("positive off-diagonal entry");
                off_sum += -values[k];
            }
        }
        if (!(d > 0.0) || d < off_sum)
            throw std::logic_error("row is not diagonally dominant");
    }

    return SparseOperator(n, std::move(row_ptr), std::move(cols), std::move(values), shift);
}

void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y)
{
    if (x.size() != op.dim() || y.size() != op.dim())
        throw std::invalid_argument(fmt::format("dimension mismatch: operator {} vs vectors {} / {}",
                                                op.dim(), x.size(), y.size()));
    const auto rp = op.row_ptr();
    const auto cols = op.cols();
    const auto vals = op.values();
    for (std::size_t r = 0; r < op.dim(); ++r) {
        double sum = 0.0;
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
            sum += vals[k] * x[cols[k]];
        y[r] = sum;
    }
}

std::vector<double> apply(const SparseOperator& op, std::span<const double> x)
{
    std::vector<double> y(op.dim());
    apply(op, x, y);
    return y;
}

}  // namespace mplab
