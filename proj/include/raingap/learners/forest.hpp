#pragma once

#include "raingap/learners/cart.hpp"
#include "raingap/learners/learner.hpp"

namespace raingap {

// Bagged CART ensemble: each tree fits a bootstrap sample of size n;
// classification trees draw sqrt(d) candidate features per node, regression
// trees consider all. Classification aggregates hard votes (ties -> class 0),
// regression averages.
class ForestModel final : public FittedModel {
public:
    struct Options {
        Task task = Task::Regress;
        std::size_t n_estimators = 100;
        std::size_t max_depth = SIZE_MAX;
        std::size_t min_samples_split = 2;
        std::size_t min_samples_leaf = 1;
        std::uint64_t seed = 0;
    };

    static std::unique_ptr<ForestModel> fit_model(const Options& opt, const Matrix& X,
                                                  const std::vector<double>& y,
                                                  unsigned threads = 0);
    static std::unique_ptr<ForestModel> fit_model(const LearnerSpec& spec, const Matrix& X,
                                                  const std::vector<double>& y,
                                                  unsigned threads = 0);

    std::vector<double> predict(const Matrix& X) const override;
    std::size_t n_inputs() const override { return n_inputs_; }
    std::string family_tag() const override { return "forest"; }

    const std::vector<CartTree>& trees() const { return trees_; }

    // Stable digest of every tree's structure (leak audits, determinism checks).
    std::string digest() const;

private:
    Task task_ = Task::Regress;
    std::size_t n_inputs_ = 0;
    std::vector<CartTree> trees_;
};

}  // namespace raingap
