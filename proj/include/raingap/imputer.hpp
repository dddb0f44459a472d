#pragma once

#include "raingap/learners/forest.hpp"

namespace raingap {

// Iterative random-forest completion: one regressor per feature column
// (that column as output, the rest as inputs), fitted on training rows only.
// Missing test cells start at the training column means and are swept in
// ascending-training-missingness order until the fill stabilizes.
class ImputerModel {
public:
    struct Options {
        std::size_t n_trees = 100;
        std::size_t max_rounds = 10;
        double tol = 1e-6;  // mean squared change per filled cell
        std::uint64_t seed = 0;
    };

    static ImputerModel fit(const Matrix& train, const Options& opt,
                            const std::vector<std::string>& column_names = {},
                            unsigned threads = 0);

    // Fills every missing cell; originally present cells pass through
    // untouched.
    Matrix impute(const Matrix& test_rows, unsigned threads = 0) const;

    const std::vector<std::size_t>& visit_order() const { return visit_order_; }
    const std::vector<double>& column_means() const { return column_means_; }

    // Digest over all fitted forests (leak audits).
    std::string digest() const;

private:
    Options opt_;
    std::size_t n_cols_ = 0;
    std::vector<double> column_means_;
    std::vector<std::size_t> visit_order_;
    std::vector<std::unique_ptr<ForestModel>> models_;  // per column
};

}  // namespace raingap
