#include "raingap/imputer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace raingap {

ImputerModel ImputerModel::fit(const Matrix& train, const Options& opt,
                               const std::vector<std::string>& column_names,
                               unsigned threads) {
    if (train.cols < 2)
        throw DataError("ImputerModel: need at least 2 feature columns");
    if (train.rows == 0) throw DataError("ImputerModel: empty training set");
    if (!column_names.empty() && column_names.size() != train.cols)
        throw DataError("ImputerModel: column name count mismatch");

    ImputerModel model;
    model.opt_ = opt;
    model.n_cols_ = train.cols;

    std::vector<std::size_t> miss_count(train.cols, 0);
    model.column_means_.assign(train.cols, 0.0);
    for (std::size_t c = 0; c < train.cols; ++c) {
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t r = 0; r < train.rows; ++r) {
            double v = train.at(r, c);
            if (is_missing(v)) {
                miss_count[c]++;
            } else {
                sum += v;
                present++;
            }
        }
        if (present == 0)
            throw DataError("ImputerModel: column " + std::to_string(c) +
                            " entirely missing in training data");
        model.column_means_[c] = sum / present;
    }

    model.visit_order_.resize(train.cols);
    std::iota(model.visit_order_.begin(), model.visit_order_.end(), 0);
    auto name_of = [&](std::size_t c) {
        return column_names.empty() ? std::to_string(c) : column_names[c];
    };
    std::sort(model.visit_order_.begin(), model.visit_order_.end(),
              [&](std::size_t a, std::size_t b) {
                  if (miss_count[a] != miss_count[b]) return miss_count[a] < miss_count[b];
                  return name_of(a) < name_of(b);
              });

    // Each column's regressor trains on rows where that column is present,
    // with remaining missing inputs mean-filled (training tables arriving
    // from complete-case sampling have none).
    model.models_.resize(train.cols);
    parallel_for_blocks(
        train.cols, effective_threads(threads), [&](std::size_t begin, std::size_t end) {
            for (std::size_t c = begin; c < end; ++c) {
                std::vector<std::size_t> rows;
                for (std::size_t r = 0; r < train.rows; ++r)
                    if (!is_missing(train.at(r, c))) rows.push_back(r);
                Matrix X(rows.size(), train.cols - 1);
                std::vector<double> y(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    y[i] = train.at(rows[i], c);
                    std::size_t out = 0;
                    for (std::size_t k = 0; k < train.cols; ++k) {
                        if (k == c) continue;
                        double v = train.at(rows[i], k);
                        X.at(i, out++) = is_missing(v) ? model.column_means_[k] : v;
                    }
                }
                ForestModel::Options fopt;
                fopt.task = Task::Regress;
                fopt.n_estimators = opt.n_trees;
                fopt.max_depth = SIZE_MAX;
                fopt.min_samples_leaf = 1;
                fopt.seed = mix_seed(opt.seed, c);
                model.models_[c] = ForestModel::fit_model(fopt, X, y, 1);
            }
        });
    return model;
}

Matrix ImputerModel::impute(const Matrix& test_rows, unsigned threads) const {
    if (test_rows.cols != n_cols_)
        throw DataError("ImputerModel: test schema mismatch");
    Matrix work = test_rows;

    // Rows and cells that need filling, per column.
    std::vector<std::vector<std::size_t>> holes(n_cols_);
    std::size_t n_holes = 0;
    for (std::size_t c = 0; c < n_cols_; ++c)
        for (std::size_t r = 0; r < work.rows; ++r)
            if (is_missing(work.at(r, c))) {
                holes[c].push_back(r);
                n_holes++;
            }
    if (n_holes == 0) return work;

    for (std::size_t c = 0; c < n_cols_; ++c)
        for (std::size_t r : holes[c]) work.at(r, c) = column_means_[c];

    for (std::size_t round = 0; round < opt_.max_rounds; ++round) {
        double sq_change = 0.0;
        for (std::size_t c : visit_order_) {
            if (holes[c].empty()) continue;
            Matrix X(holes[c].size(), n_cols_ - 1);
            for (std::size_t i = 0; i < holes[c].size(); ++i) {
                std::size_t out = 0;
                for (std::size_t k = 0; k < n_cols_; ++k)
                    if (k != c) X.at(i, out++) = work.at(holes[c][i], k);
            }
            std::vector<double> pred(holes[c].size());
            const ForestModel& forest = *models_[c];
            parallel_for_blocks(holes[c].size(), effective_threads(threads),
                                [&](std::size_t begin, std::size_t end) {
                                    Matrix block(end - begin, X.cols);
                                    std::copy(X.row(begin), X.row(begin) + block.data.size(),
                                              block.data.begin());
                                    std::vector<double> p = forest.predict(block);
                                    std::copy(p.begin(), p.end(), pred.begin() + begin);
                                });
            for (std::size_t i = 0; i < holes[c].size(); ++i) {
                double old = work.at(holes[c][i], c);
                sq_change += (pred[i] - old) * (pred[i] - old);
                work.at(holes[c][i], c) = pred[i];
            }
        }
        if (sq_change / n_holes < opt_.tol) break;
    }
    return work;
}

std::string ImputerModel::digest() const {
    std::ostringstream os;
    for (const auto& m : models_) os << m->digest() << ';';
    return os.str();
}

}  // namespace raingap
