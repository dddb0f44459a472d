#pragma once

#include "raingap/learners/learner.hpp"

namespace raingap {

enum class KnnAlgorithm { Auto, KdTree, Brute };
enum class KnnWeighting { Uniform, Distance };

// Neighbour order is (squared distance, training index) ascending, so every
// algorithm returns the identical neighbour set.
std::vector<std::size_t> knn_brute_neighbours(const Matrix& train, const double* query,
                                              std::size_t k);

class KnnModel final : public FittedModel {
public:
    struct Options {
        Task task = Task::Regress;
        std::size_t n_neighbours = 5;
        std::size_t leaf_size = 1;
        KnnAlgorithm algorithm = KnnAlgorithm::Auto;
        KnnWeighting weighting = KnnWeighting::Uniform;
    };

    static std::unique_ptr<KnnModel> fit_model(const Options& opt, const Matrix& X,
                                               const std::vector<double>& y);
    static std::unique_ptr<KnnModel> fit_model(const LearnerSpec& spec, const Matrix& X,
                                               const std::vector<double>& y);

    std::vector<double> predict(const Matrix& X) const override;
    std::size_t n_inputs() const override { return train_.cols; }
    std::string family_tag() const override { return "knn"; }

    std::vector<std::size_t> neighbours(const double* query) const;

private:
    struct KdNode {
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::size_t begin = 0, end = 0;  // leaf range into order_
        int left = -1, right = -1;
    };

    void build_kdtree();
    int build_node(std::size_t begin, std::size_t end);
    void query_node(int node, const double* query,
                    std::vector<std::pair<double, std::size_t>>& heap,
                    std::size_t k) const;

    Options opt_;
    Matrix train_;
    std::vector<double> y_;
    std::vector<std::size_t> order_;  // kd-tree leaf permutation
    std::vector<KdNode> kd_nodes_;
};

}  // namespace raingap
