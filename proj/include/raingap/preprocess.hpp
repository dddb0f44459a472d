#pragma once

#include <cstdint>
#include <vector>

#include "raingap/common.hpp"
#include "raingap/series.hpp"

namespace raingap {

struct FoldPlan {
    int n_folds = 5;
    std::vector<int> assignment;  // per-row fold index, 0..n_folds-1
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_rows(int fold) const;
    std::vector<std::size_t> other_rows(int fold) const;
};

// Uniform random assignment with fold sizes differing by at most one;
// deterministic for a given seed.
FoldPlan make_folds(std::size_t n_rows, int n_folds, std::uint64_t seed);

// Per-feature affine map learned from training rows only. Missing cells are
// ignored when fitting and pass through transform unchanged. Constant
// columns transform to 0. Test values outside the training range are not
// clipped.
class MinMaxScaler {
public:
    static MinMaxScaler fit(const Matrix& train_rows);

    Matrix transform(const Matrix& rows) const;

    const std::vector<double>& mins() const { return min_; }
    const std::vector<double>& maxs() const { return max_; }

    // Stable byte serialization of the fitted parameters (leak audits).
    std::string digest() const;

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

// Eqs-of-cycle encoding: x in 1..max_x maps to (sin, cos) of 2*pi*x/max_x.
std::pair<double, double> encode_cyclic(int x, int max_x);

// Indices of rows with no missing cell across X and y.
std::vector<std::size_t> complete_case_rows(const Matrix& X, const std::vector<double>& y);

// 1 where target > 0, 0 where target == 0; defined only for present targets.
std::vector<int> binary_target(const std::vector<double>& target);

// Adds hour-of-day and month sin/cos columns derived from the timestamps.
// Both half-hours of an hour share one encoding; hour runs 1..24, month 1..12.
void append_cyclic_features(SeriesTable& table);

Matrix rows_to_matrix(const SeriesTable& table, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& feature_cols);

}  // namespace raingap
