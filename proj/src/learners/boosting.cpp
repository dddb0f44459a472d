#include "raingap/learners/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace raingap {

namespace {

struct GradAccum {
    double g = 0.0;
    double h = 0.0;
    double score() const { return h > 0.0 ? g * g / h : 0.0; }
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

GradTree GradTree::fit(const Matrix& X, const std::vector<double>& grad,
                       const std::vector<double>& hess,
                       const std::vector<std::size_t>& rows, const GradTreeOptions& opt) {
    if (rows.empty()) throw DataError("GradTree: empty sample");
    GradTree tree;

    struct Work {
        int node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Work> stack;

    auto make_node = [&](const std::vector<std::size_t>& node_rows) {
        GradNode node;
        double g = 0.0, h = 0.0;
        for (std::size_t r : node_rows) {
            g += grad[r];
            h += hess[r];
        }
        node.value = h > 0.0 ? -g / h : 0.0;
        tree.nodes_.push_back(node);
        return static_cast<int>(tree.nodes_.size() - 1);
    };

    std::vector<std::size_t> root_rows = rows;
    int root = make_node(root_rows);
    stack.push_back({root, std::move(root_rows), 0});

    std::vector<std::pair<double, std::size_t>> order;
    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();
        if (w.depth >= opt.max_depth || w.rows.size() < 2) continue;

        GradAccum total;
        for (std::size_t r : w.rows) {
            total.g += grad[r];
            total.h += hess[r];
        }

        bool found = false;
        int best_feature = -1;
        double best_threshold = 0.0, best_gain = 0.0;
        order.resize(w.rows.size());
        for (std::size_t f = 0; f < X.cols; ++f) {
            for (std::size_t i = 0; i < w.rows.size(); ++i)
                order[i] = {X.at(w.rows[i], f), w.rows[i]};
            std::sort(order.begin(), order.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            GradAccum left, right = total;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                std::size_t r = order[i].second;
                left.g += grad[r];
                left.h += hess[r];
                right.g -= grad[r];
                right.h -= hess[r];
                if (order[i].first == order[i + 1].first) continue;
                if (left.h < opt.min_child_weight || right.h < opt.min_child_weight)
                    continue;
                double gain = left.score() + right.score() - total.score();
                if (gain > best_gain + 1e-12 || (!found && gain > 1e-12)) {
                    found = true;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (order[i].first + order[i + 1].first);
                    best_gain = gain;
                }
            }
        }
        if (!found) continue;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : w.rows) {
            if (X.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        int left = make_node(left_rows);
        int right = make_node(right_rows);
        tree.nodes_[w.node].feature = best_feature;
        tree.nodes_[w.node].threshold = best_threshold;
        tree.nodes_[w.node].left = left;
        tree.nodes_[w.node].right = right;
        stack.push_back({left, std::move(left_rows), w.depth + 1});
        stack.push_back({right, std::move(right_rows), w.depth + 1});
    }
    return tree;
}

double GradTree::predict_row(const double* row) const {
    int idx = 0;
    while (nodes_[idx].feature >= 0)
        idx = row[nodes_[idx].feature] <= nodes_[idx].threshold ? nodes_[idx].left
                                                                : nodes_[idx].right;
    return nodes_[idx].value;
}

std::unique_ptr<BoostingModel> BoostingModel::fit_model(const LearnerSpec& spec,
                                                        const Matrix& X,
                                                        const std::vector<double>& y) {
    check_training_inputs(X, y, spec.task);
    auto model = std::make_unique<BoostingModel>();
    model->task_ = spec.task;
    model->n_inputs_ = X.cols;
    model->learning_rate_ = spec.params.get_num("learning_rate", 0.1);
    std::size_t n_rounds = static_cast<std::size_t>(spec.params.get_num("n_rounds", 100));
    double subsample = spec.params.get_num("subsample", 1.0);

    GradTreeOptions topt;
    topt.max_depth = static_cast<std::size_t>(spec.params.get_num("max_depth", 8));
    topt.min_child_weight = spec.params.get_num("min_child_weight", 1.0);

    const std::size_t n = X.rows;
    std::vector<double> f(n), grad(n), hess(n);

    if (spec.task == Task::Regress) {
        model->base_score_ = std::accumulate(y.begin(), y.end(), 0.0) / n;
    } else {
        double rate = std::accumulate(y.begin(), y.end(), 0.0) / n;
        rate = std::clamp(rate, 1e-6, 1.0 - 1e-6);
        model->base_score_ = std::log(rate / (1.0 - rate));
    }
    std::fill(f.begin(), f.end(), model->base_score_);

    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (std::size_t round = 0; round < n_rounds; ++round) {
        if (spec.task == Task::Regress) {
            for (std::size_t i = 0; i < n; ++i) {
                grad[i] = f[i] - y[i];
                hess[i] = 1.0;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                double p = sigmoid(f[i]);
                grad[i] = p - y[i];
                hess[i] = std::max(p * (1.0 - p), 1e-12);
            }
        }

        std::vector<std::size_t> rows;
        if (subsample >= 1.0) {
            rows = all_rows;
        } else {
            std::mt19937_64 rng(mix_seed(spec.seed, round));
            rows = all_rows;
            std::shuffle(rows.begin(), rows.end(), rng);
            rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(subsample * n)));
            std::sort(rows.begin(), rows.end());
        }

        GradTree tree = GradTree::fit(X, grad, hess, rows, topt);
        for (std::size_t i = 0; i < n; ++i)
            f[i] += model->learning_rate_ * tree.predict_row(X.row(i));
        model->trees_.push_back(std::move(tree));

        double loss = 0.0;
        if (spec.task == Task::Regress) {
            for (std::size_t i = 0; i < n; ++i) loss += 0.5 * (f[i] - y[i]) * (f[i] - y[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                double p = std::clamp(sigmoid(f[i]), 1e-15, 1.0 - 1e-15);
                loss -= y[i] > 0.5 ? std::log(p) : std::log(1.0 - p);
            }
        }
        model->train_loss_.push_back(loss / n);
    }
    return model;
}

std::vector<double> BoostingModel::raw_scores(const Matrix& X) const {
    check_schema(X);
    std::vector<double> f(X.rows, base_score_);
    for (const auto& tree : trees_)
        for (std::size_t i = 0; i < X.rows; ++i)
            f[i] += learning_rate_ * tree.predict_row(X.row(i));
    return f;
}

std::vector<double> BoostingModel::predict(const Matrix& X) const {
    std::vector<double> f = raw_scores(X);
    if (task_ == Task::Classify)
        for (double& v : f) v = sigmoid(v) > 0.5 ? 1.0 : 0.0;
    return f;
}

}  // namespace raingap
