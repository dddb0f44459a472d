#pragma once

#include "raingap/learners/learner.hpp"

namespace raingap {

struct GradTreeOptions {
    std::size_t max_depth = 8;
    double min_child_weight = 1.0;  // minimum hessian sum per child
};

struct GradNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;  // leaf step, -G/H
    int left = -1;
    int right = -1;
};

// Second-order regression tree on per-sample (gradient, hessian) pairs.
class GradTree {
public:
    static GradTree fit(const Matrix& X, const std::vector<double>& grad,
                        const std::vector<double>& hess,
                        const std::vector<std::size_t>& rows, const GradTreeOptions& opt);
    double predict_row(const double* row) const;
    const std::vector<GradNode>& nodes() const { return nodes_; }

private:
    std::vector<GradNode> nodes_;
};

// Stagewise boosting: squared loss for regression, logistic loss for
// classification (leaf steps are Newton steps on the per-leaf objective).
class BoostingModel final : public FittedModel {
public:
    static std::unique_ptr<BoostingModel> fit_model(const LearnerSpec& spec,
                                                    const Matrix& X,
                                                    const std::vector<double>& y);

    std::vector<double> predict(const Matrix& X) const override;
    std::size_t n_inputs() const override { return n_inputs_; }
    std::string family_tag() const override { return "boosting"; }

    // Raw additive score f(x) (log-odds for classification).
    std::vector<double> raw_scores(const Matrix& X) const;
    const std::vector<double>& train_loss_per_round() const { return train_loss_; }

private:
    Task task_ = Task::Regress;
    std::size_t n_inputs_ = 0;
    double base_score_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<GradTree> trees_;
    std::vector<double> train_loss_;  // loss after each round, training set
};

}  // namespace raingap
