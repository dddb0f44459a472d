#pragma once

#include "raingap/learners/learner.hpp"

namespace raingap {

// Fully connected network: rectifier hidden layers of fixed width, sigmoid
// output with log loss for classification, linear output with squared loss
// for regression. Trained by mini-batch gradient descent with adaptive
// moment estimation.
class NetworkModel final : public FittedModel {
public:
    struct Options {
        Task task = Task::Classify;
        std::size_t hidden_layers = 2;
        std::size_t width = 64;
        double learning_rate = 1e-3;
        std::size_t batch_size = 256;
        std::size_t epochs = 50;
        std::uint64_t seed = 0;
    };

    static std::unique_ptr<NetworkModel> fit_model(const Options& opt, const Matrix& X,
                                                   const std::vector<double>& y);
    static std::unique_ptr<NetworkModel> fit_model(const LearnerSpec& spec, const Matrix& X,
                                                   const std::vector<double>& y);

    std::vector<double> predict(const Matrix& X) const override;
    std::size_t n_inputs() const override { return layer_sizes_.front(); }
    std::string family_tag() const override { return "network"; }

    // Flat parameter access + full-batch loss/gradient, used by the
    // finite-difference gradient check.
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    double loss_and_grad(const Matrix& X, const std::vector<double>& y,
                         const std::vector<std::size_t>& rows,
                         std::vector<double>* grad_out) const;

    static NetworkModel make_untrained(const Options& opt, std::size_t n_inputs);

private:
    std::vector<double> forward_scores(const Matrix& X) const;

    Task task_ = Task::Classify;
    std::vector<std::size_t> layer_sizes_;  // input, hidden..., 1
    std::vector<double> params_;            // weights then biases per layer
};

}  // namespace raingap
