#include "raingap/learners/cart.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace raingap {

namespace {

// Impurity "score" to maximize: for Variance, -(SS within); for Gini,
// sum of squared class counts over size. Gain = score(children) - score(parent).
struct Accum {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double y) {
        n += 1.0;
        sum += y;
        sum_sq += y * y;
    }
    void remove(double y) {
        n -= 1.0;
        sum -= y;
        sum_sq -= y * y;
    }

    double score(SplitCriterion c) const {
        if (n == 0.0) return 0.0;
        if (c == SplitCriterion::Variance) return sum * sum / n - sum_sq;
        // Gini with labels in {0,1}: ones = sum, zeros = n - sum.
        double ones = sum, zeros = n - sum;
        return (ones * ones + zeros * zeros) / n;
    }
};

}  // namespace

BestSplit best_split(const Matrix& X, const std::vector<double>& y,
                     const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& feature_candidates,
                     SplitCriterion criterion, std::size_t min_samples_leaf) {
    BestSplit best;
    if (rows.size() < 2) return best;

    Accum total;
    for (std::size_t r : rows) total.add(y[r]);
    double parent_score = total.score(criterion);

    std::vector<std::pair<double, double>> xy(rows.size());
    for (std::size_t f : feature_candidates) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            xy[i] = {X.at(rows[i], f), y[rows[i]]};
        std::sort(xy.begin(), xy.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        Accum left, right = total;
        for (std::size_t i = 0; i + 1 < xy.size(); ++i) {
            left.add(xy[i].second);
            right.remove(xy[i].second);
            if (xy[i].first == xy[i + 1].first) continue;
            if (left.n < static_cast<double>(min_samples_leaf) ||
                right.n < static_cast<double>(min_samples_leaf))
                continue;
            double gain = left.score(criterion) + right.score(criterion) - parent_score;
            if (gain > best.gain + 1e-12 || (!best.found && gain > 1e-12)) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (xy[i].first + xy[i + 1].first);
                best.gain = gain;
            }
        }
    }
    return best;
}

CartTree CartTree::fit(const Matrix& X, const std::vector<double>& y,
                       std::vector<std::size_t> rows, const CartOptions& opt,
                       std::uint64_t seed) {
    if (rows.empty()) throw DataError("CartTree: empty sample");
    CartTree tree;
    std::mt19937_64 rng(seed);

    std::vector<std::size_t> all_features(X.cols);
    std::iota(all_features.begin(), all_features.end(), 0);

    struct Work {
        int node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Work> stack;

    auto make_node = [&tree, &y](const std::vector<std::size_t>& node_rows) {
        CartNode node;
        double s = 0.0;
        for (std::size_t r : node_rows) s += y[r];
        node.value = s / node_rows.size();
        tree.nodes_.push_back(node);
        return static_cast<int>(tree.nodes_.size() - 1);
    };

    int root = make_node(rows);
    stack.push_back({root, std::move(rows), 0});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        if (w.depth >= opt.max_depth || w.rows.size() < opt.min_samples_split) continue;

        std::vector<std::size_t> candidates;
        if (opt.max_features == 0 || opt.max_features >= X.cols) {
            candidates = all_features;
        } else {
            candidates = all_features;
            // Partial Fisher-Yates, then ascending order for a stable scan.
            for (std::size_t i = 0; i < opt.max_features; ++i) {
                std::size_t j = i + rng() % (candidates.size() - i);
                std::swap(candidates[i], candidates[j]);
            }
            candidates.resize(opt.max_features);
            std::sort(candidates.begin(), candidates.end());
        }

        BestSplit split = best_split(X, y, w.rows, candidates, opt.criterion,
                                     opt.min_samples_leaf);
        if (!split.found) continue;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : w.rows) {
            if (X.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        if (left_rows.empty() || right_rows.empty()) continue;

        int left = make_node(left_rows);
        int right = make_node(right_rows);
        tree.nodes_[w.node].feature = split.feature;
        tree.nodes_[w.node].threshold = split.threshold;
        tree.nodes_[w.node].left = left;
        tree.nodes_[w.node].right = right;
        stack.push_back({left, std::move(left_rows), w.depth + 1});
        stack.push_back({right, std::move(right_rows), w.depth + 1});
    }
    return tree;
}

double CartTree::predict_row(const double* row) const {
    int idx = 0;
    while (nodes_[idx].feature >= 0)
        idx = row[nodes_[idx].feature] <= nodes_[idx].threshold ? nodes_[idx].left
                                                                : nodes_[idx].right;
    return nodes_[idx].value;
}

}  // namespace raingap
