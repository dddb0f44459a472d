#include "raingap/learners/forest.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

namespace raingap {

std::unique_ptr<ForestModel> ForestModel::fit_model(const Options& opt, const Matrix& X,
                                                    const std::vector<double>& y,
                                                    unsigned threads) {
    check_training_inputs(X, y, opt.task);
    auto model = std::make_unique<ForestModel>();
    model->task_ = opt.task;
    model->n_inputs_ = X.cols;
    model->trees_.resize(opt.n_estimators);

    CartOptions copt;
    copt.criterion =
        opt.task == Task::Classify ? SplitCriterion::Gini : SplitCriterion::Variance;
    copt.max_depth = opt.max_depth;
    copt.min_samples_split = opt.min_samples_split;
    copt.min_samples_leaf = opt.min_samples_leaf;
    copt.max_features =
        opt.task == Task::Classify
            ? std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(X.cols)))
            : 0;

    const std::size_t n = X.rows;
    parallel_for_blocks(opt.n_estimators, effective_threads(threads),
                        [&](std::size_t begin, std::size_t end) {
                            for (std::size_t t = begin; t < end; ++t) {
                                std::mt19937_64 rng(mix_seed(opt.seed, t));
                                std::vector<std::size_t> sample(n);
                                for (std::size_t i = 0; i < n; ++i) sample[i] = rng() % n;
                                model->trees_[t] = CartTree::fit(
                                    X, y, std::move(sample), copt, mix_seed(opt.seed, t + opt.n_estimators));
                            }
                        });
    return model;
}

std::unique_ptr<ForestModel> ForestModel::fit_model(const LearnerSpec& spec,
                                                    const Matrix& X,
                                                    const std::vector<double>& y,
                                                    unsigned threads) {
    Options opt;
    opt.task = spec.task;
    opt.seed = spec.seed;
    opt.n_estimators = static_cast<std::size_t>(spec.params.get_num("n_estimators", 100));
    double depth = spec.params.get_num("max_depth",
                                       std::numeric_limits<double>::infinity());
    opt.max_depth = std::isinf(depth) ? SIZE_MAX : static_cast<std::size_t>(depth);
    opt.min_samples_split =
        static_cast<std::size_t>(spec.params.get_num("min_samples_split", 2));
    opt.min_samples_leaf =
        static_cast<std::size_t>(spec.params.get_num("min_samples_leaf", 1));
    return fit_model(opt, X, y, threads);
}

std::vector<double> ForestModel::predict(const Matrix& X) const {
    check_schema(X);
    std::vector<double> out(X.rows, 0.0);
    if (task_ == Task::Regress) {
        for (const auto& tree : trees_)
            for (std::size_t i = 0; i < X.rows; ++i) out[i] += tree.predict_row(X.row(i));
        for (double& v : out) v /= trees_.size();
    } else {
        std::vector<std::size_t> votes(X.rows, 0);
        for (const auto& tree : trees_)
            for (std::size_t i = 0; i < X.rows; ++i)
                if (tree.predict_row(X.row(i)) > 0.5) votes[i]++;
        for (std::size_t i = 0; i < X.rows; ++i)
            out[i] = 2 * votes[i] > trees_.size() ? 1.0 : 0.0;  // ties -> class 0
    }
    return out;
}

std::string ForestModel::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* p, std::size_t len) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& tree : trees_)
        for (const auto& node : tree.nodes()) {
            mix_bytes(&node.feature, sizeof node.feature);
            mix_bytes(&node.threshold, sizeof node.threshold);
            mix_bytes(&node.value, sizeof node.value);
            mix_bytes(&node.left, sizeof node.left);
            mix_bytes(&node.right, sizeof node.right);
        }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace raingap
