#ifndef HOWIRE_MATCHING_HPP
#define HOWIRE_MATCHING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <vector>

#include "howire/error.hpp"

namespace howire {

/// Dense row-major cost matrix.
class CostMatrix {
public:
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    CostMatrix(std::initializer_list<std::initializer_list<double>> init) : rows_(init.size()), cols_(0) {
        if (rows_ > 0) cols_ = init.begin()->size();
        for (const auto& row : init) {
            if (row.size() != cols_) throw ValidationError("ragged cost matrix");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    bool finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

inline constexpr long kUnassigned = -1;

/// Row -> column mapping; kUnassigned for rows left out when rows exceed columns.
struct Assignment {
    std::vector<long> column_of_row;
    double cost = 0.0;

    std::size_t matched() const {
        return static_cast<std::size_t>(
            std::count_if(column_of_row.begin(), column_of_row.end(), [](long c) { return c != kUnassigned; }));
    }
};

/// Sum of matched entries accumulated in row order.
inline double assignment_cost(const CostMatrix& cost, const std::vector<long>& column_of_row) {
    double total = 0.0;
    for (std::size_t r = 0; r < column_of_row.size(); ++r)
        if (column_of_row[r] != kUnassigned) total += cost(r, static_cast<std::size_t>(column_of_row[r]));
    return total;
}

/// Minimum-cost assignment (Kuhn-Munkres with potentials, O(R^2 C)).
///
/// Every row is matched when R <= C. When R > C the matrix is padded with
/// R - C constant sentinel columns (max entry + 1); rows landing on a sentinel
/// are reported as kUnassigned. A constant pad adds the same amount to every
/// complete assignment, so the choice of which C rows to match stays optimal.
inline Assignment hungarian(const CostMatrix& cost) {
    if (!cost.finite()) throw ValidationError("hungarian: cost matrix has non-finite entries");
    const std::size_t rows = cost.rows();
    const std::size_t real_cols = cost.cols();
    Assignment out;
    out.column_of_row.assign(rows, kUnassigned);
    if (rows == 0 || real_cols == 0) return out;

    const std::size_t cols = std::max(rows, real_cols);
    double sentinel = 0.0;
    if (cols > real_cols) {
        sentinel = cost(0, 0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < real_cols; ++c) sentinel = std::max(sentinel, cost(r, c));
        sentinel += 1.0;
    }
    auto a = [&](std::size_t r, std::size_t c) { return c < real_cols ? cost(r, c) : sentinel; };

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual start column.
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0), minv(cols + 1);
    std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
    std::vector<char> used(cols + 1);
    for (std::size_t i = 1; i <= rows; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= cols; ++j)
        if (p[j] != 0 && j - 1 < real_cols) out.column_of_row[p[j] - 1] = static_cast<long>(j - 1);
    out.cost = assignment_cost(cost, out.column_of_row);
    return out;
}

inline constexpr std::size_t kBruteForceMaxSide = 8;

/// Exhaustive minimum over all assignments matching min(R, C) rows.
///
/// Rows are enumerated in order and each tries kUnassigned first, then columns
/// in increasing order; only strictly better totals replace the incumbent, so
/// ties resolve to the lexicographically smallest mapping.
inline Assignment brute_force_matching(const CostMatrix& cost) {
    if (!cost.finite()) throw ValidationError("brute_force_matching: cost matrix has non-finite entries");
    if (cost.rows() > kBruteForceMaxSide)
        throw ValidationError("brute_force_matching: at most 8 rows supported");
    const std::size_t rows = cost.rows(), cols = cost.cols();
    const std::size_t need = std::min(rows, cols);

    Assignment best;
    best.column_of_row.assign(rows, kUnassigned);
    best.cost = std::numeric_limits<double>::infinity();
    if (need == 0) {
        best.cost = 0.0;
        return best;
    }

    std::vector<long> current(rows, kUnassigned);
    std::vector<char> used(cols, 0);
    auto recurse = [&](auto&& self, std::size_t row, std::size_t matched) -> void {
        if (row == rows) {
            if (matched != need) return;
            const double total = assignment_cost(cost, current);
            if (total < best.cost) {
                best.cost = total;
                best.column_of_row = current;
            }
            return;
        }
        if (need - matched < rows - row) {
            current[row] = kUnassigned;
            self(self, row + 1, matched);
        }
        for (std::size_t c = 0; c < cols && matched < need; ++c) {
            if (used[c]) continue;
            used[c] = 1;
            current[row] = static_cast<long>(c);
            self(self, row + 1, matched + 1);
            used[c] = 0;
        }
        current[row] = kUnassigned;
    };
    recurse(recurse, 0, 0);
    return best;
}

} // namespace howire

#endif
