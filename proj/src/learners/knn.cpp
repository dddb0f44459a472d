#include "raingap/learners/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace raingap {

namespace {

double dist_sq(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

}  // namespace

std::vector<std::size_t> knn_brute_neighbours(const Matrix& train, const double* query,
                                              std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all(train.rows);
    for (std::size_t i = 0; i < train.rows; ++i)
        all[i] = {dist_sq(train.row(i), query, train.cols), i};
    k = std::min(k, train.rows);
    std::partial_sort(all.begin(), all.begin() + k, all.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = all[i].second;
    return out;
}

std::unique_ptr<KnnModel> KnnModel::fit_model(const Options& opt, const Matrix& X,
                                              const std::vector<double>& y) {
    check_training_inputs(X, y, opt.task);
    auto model = std::make_unique<KnnModel>();
    model->opt_ = opt;
    model->train_ = X;
    model->y_ = y;
    if (opt.algorithm != KnnAlgorithm::Brute) model->build_kdtree();
    return model;
}

std::unique_ptr<KnnModel> KnnModel::fit_model(const LearnerSpec& spec, const Matrix& X,
                                              const std::vector<double>& y) {
    Options opt;
    opt.task = spec.task;
    opt.n_neighbours = static_cast<std::size_t>(spec.params.get_num("n_neighbours", 5));
    opt.leaf_size = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 spec.params.get_num("leaf_size", 1)));
    std::string algo = spec.params.get_cat("algorithm", "auto");
    if (algo == "auto")
        opt.algorithm = KnnAlgorithm::Auto;
    else if (algo == "kd_tree" || algo == "kd-tree")
        opt.algorithm = KnnAlgorithm::KdTree;
    else if (algo == "brute")
        opt.algorithm = KnnAlgorithm::Brute;
    else
        throw ConfigError("knn: unknown algorithm " + algo);
    opt.weighting = spec.params.get_cat("weighting", "uniform") == "distance"
                        ? KnnWeighting::Distance
                        : KnnWeighting::Uniform;
    return fit_model(opt, X, y);
}

void KnnModel::build_kdtree() {
    order_.resize(train_.rows);
    std::iota(order_.begin(), order_.end(), 0);
    kd_nodes_.clear();
    build_node(0, train_.rows);
}

int KnnModel::build_node(std::size_t begin, std::size_t end) {
    KdNode node;
    node.begin = begin;
    node.end = end;
    int idx = static_cast<int>(kd_nodes_.size());
    kd_nodes_.push_back(node);
    if (end - begin <= opt_.leaf_size || end - begin < 2) return idx;

    // Split on the axis with the widest spread, at the median.
    std::size_t axis = 0;
    double best_spread = -1.0;
    for (std::size_t c = 0; c < train_.cols; ++c) {
        double lo = train_.at(order_[begin], c), hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            double v = train_.at(order_[i], c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = c;
        }
    }
    if (best_spread <= 0.0) return idx;  // all points identical

    std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         return train_.at(a, axis) < train_.at(b, axis);
                     });
    double split = train_.at(order_[mid], axis);

    kd_nodes_[idx].axis = static_cast<int>(axis);
    kd_nodes_[idx].split = split;
    int left = build_node(begin, mid);
    int right = build_node(mid, end);
    kd_nodes_[idx].left = left;
    kd_nodes_[idx].right = right;
    return idx;
}

void KnnModel::query_node(int node, const double* query,
                          std::vector<std::pair<double, std::size_t>>& heap,
                          std::size_t k) const {
    const KdNode& nd = kd_nodes_[node];
    if (nd.axis < 0) {
        for (std::size_t i = nd.begin; i < nd.end; ++i) {
            std::size_t r = order_[i];
            std::pair<double, std::size_t> cand{dist_sq(train_.row(r), query, train_.cols), r};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    double diff = query[nd.axis] - nd.split;
    int near = diff < 0.0 ? nd.left : nd.right;
    int far = diff < 0.0 ? nd.right : nd.left;
    query_node(near, query, heap, k);
    // The far side can still hold an equal-distance lower-index neighbour,
    // so prune only on a strict bound violation.
    if (heap.size() < k || diff * diff <= heap.front().first)
        query_node(far, query, heap, k);
}

std::vector<std::size_t> KnnModel::neighbours(const double* query) const {
    std::size_t k = std::min(opt_.n_neighbours, train_.rows);
    if (opt_.algorithm == KnnAlgorithm::Brute || kd_nodes_.empty())
        return knn_brute_neighbours(train_, query, k);
    std::vector<std::pair<double, std::size_t>> heap;
    heap.reserve(k + 1);
    query_node(0, query, heap, k);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

std::vector<double> KnnModel::predict(const Matrix& X) const {
    check_schema(X);
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        std::vector<std::size_t> nbrs = neighbours(X.row(i));
        if (opt_.weighting == KnnWeighting::Distance) {
            double wsum = 0.0, acc = 0.0;
            bool exact = false;
            for (std::size_t r : nbrs)
                if (dist_sq(train_.row(r), X.row(i), train_.cols) == 0.0) exact = true;
            for (std::size_t r : nbrs) {
                double d2 = dist_sq(train_.row(r), X.row(i), train_.cols);
                if (exact && d2 > 0.0) continue;  // exact matches dominate
                double w = exact ? 1.0 : 1.0 / std::sqrt(d2);
                wsum += w;
                acc += w * y_[r];
            }
            double v = acc / wsum;
            out[i] = opt_.task == Task::Classify ? (v > 0.5 ? 1.0 : 0.0) : v;
        } else {
            double acc = 0.0;
            for (std::size_t r : nbrs) acc += y_[r];
            if (opt_.task == Task::Classify)
                out[i] = 2.0 * acc > static_cast<double>(nbrs.size()) ? 1.0 : 0.0;
            else
                out[i] = acc / nbrs.size();
        }
    }
    return out;
}

}  // namespace raingap
