#pragma once

#include <cstdint>
#include <vector>

#include "raingap/common.hpp"

namespace raingap {

enum class SplitCriterion { Gini, Variance };

struct CartOptions {
    SplitCriterion criterion = SplitCriterion::Variance;
    std::size_t max_depth = SIZE_MAX;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0;  // 0 = all features considered at every node
};

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive scan over candidate features and midpoints between adjacent
// distinct values; first strictly-best split wins (features in candidate
// order, thresholds ascending).
BestSplit best_split(const Matrix& X, const std::vector<double>& y,
                     const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& feature_candidates,
                     SplitCriterion criterion, std::size_t min_samples_leaf);

struct CartNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;  // mean target (Variance) or class-1 fraction (Gini)
    int left = -1;
    int right = -1;
};

class CartTree {
public:
    // `rows` may contain repeats (bootstrap sample). `seed` drives per-node
    // feature subsampling when opt.max_features > 0.
    static CartTree fit(const Matrix& X, const std::vector<double>& y,
                        std::vector<std::size_t> rows, const CartOptions& opt,
                        std::uint64_t seed);

    double predict_row(const double* row) const;
    const std::vector<CartNode>& nodes() const { return nodes_; }

private:
    std::vector<CartNode> nodes_;
};

}  // namespace raingap
