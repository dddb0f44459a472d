#include "raingap/learners/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace raingap {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

NetworkModel NetworkModel::make_untrained(const Options& opt, std::size_t n_inputs) {
    NetworkModel model;
    model.task_ = opt.task;
    model.layer_sizes_.push_back(n_inputs);
    for (std::size_t l = 0; l < opt.hidden_layers; ++l)
        model.layer_sizes_.push_back(opt.width);
    model.layer_sizes_.push_back(1);

    std::size_t n_params = 0;
    for (std::size_t l = 0; l + 1 < model.layer_sizes_.size(); ++l)
        n_params += model.layer_sizes_[l] * model.layer_sizes_[l + 1] +
                    model.layer_sizes_[l + 1];
    model.params_.resize(n_params);

    std::mt19937_64 rng(mix_seed(opt.seed, 0xA11CE));
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < model.layer_sizes_.size(); ++l) {
        std::size_t in = model.layer_sizes_[l], out = model.layer_sizes_[l + 1];
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / in));
        for (std::size_t i = 0; i < out * in; ++i) model.params_[off + i] = init(rng);
        off += out * in;
        for (std::size_t i = 0; i < out; ++i) model.params_[off + i] = 0.0;
        off += out;
    }
    return model;
}

double NetworkModel::loss_and_grad(const Matrix& X, const std::vector<double>& y,
                                   const std::vector<std::size_t>& rows,
                                   std::vector<double>* grad_out) const {
    const std::size_t L = layer_sizes_.size() - 1;  // weight layers
    if (grad_out) grad_out->assign(params_.size(), 0.0);

    // Per-layer parameter offsets.
    std::vector<std::size_t> w_off(L), b_off(L);
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
        w_off[l] = off;
        off += layer_sizes_[l] * layer_sizes_[l + 1];
        b_off[l] = off;
        off += layer_sizes_[l + 1];
    }

    std::vector<std::vector<double>> act(L + 1);  // post-activation per layer
    std::vector<std::vector<double>> delta(L + 1);
    double total_loss = 0.0;

    for (std::size_t r : rows) {
        act[0].assign(X.row(r), X.row(r) + X.cols);
        for (std::size_t l = 0; l < L; ++l) {
            std::size_t in = layer_sizes_[l], out = layer_sizes_[l + 1];
            act[l + 1].assign(out, 0.0);
            const double* W = params_.data() + w_off[l];
            const double* b = params_.data() + b_off[l];
            for (std::size_t o = 0; o < out; ++o) {
                double z = b[o];
                const double* w_row = W + o * in;
                for (std::size_t i = 0; i < in; ++i) z += w_row[i] * act[l][i];
                act[l + 1][o] = (l + 1 < L) ? std::max(0.0, z) : z;
            }
        }

        double z = act[L][0];
        double dz;
        if (task_ == Task::Classify) {
            double p = sigmoid(z);
            double yc = y[r] > 0.5 ? 1.0 : 0.0;
            total_loss -= yc * std::log(std::max(p, 1e-15)) +
                          (1.0 - yc) * std::log(std::max(1.0 - p, 1e-15));
            dz = p - yc;
        } else {
            double e = z - y[r];
            total_loss += 0.5 * e * e;
            dz = e;
        }
        if (!grad_out) continue;

        delta[L].assign(1, dz);
        for (std::size_t l = L; l-- > 0;) {
            std::size_t in = layer_sizes_[l], out = layer_sizes_[l + 1];
            const double* W = params_.data() + w_off[l];
            double* gW = grad_out->data() + w_off[l];
            double* gb = grad_out->data() + b_off[l];
            for (std::size_t o = 0; o < out; ++o) {
                double d = delta[l + 1][o];
                gb[o] += d;
                double* gw_row = gW + o * in;
                for (std::size_t i = 0; i < in; ++i) gw_row[i] += d * act[l][i];
            }
            if (l == 0) break;
            delta[l].assign(in, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double d = delta[l + 1][o];
                const double* w_row = W + o * in;
                for (std::size_t i = 0; i < in; ++i) delta[l][i] += d * w_row[i];
            }
            for (std::size_t i = 0; i < in; ++i)
                if (act[l][i] <= 0.0) delta[l][i] = 0.0;  // rectifier gate
        }
    }

    double inv = 1.0 / rows.size();
    if (grad_out)
        for (double& g : *grad_out) g *= inv;
    return total_loss * inv;
}

std::unique_ptr<NetworkModel> NetworkModel::fit_model(const Options& opt, const Matrix& X,
                                                      const std::vector<double>& y) {
    check_training_inputs(X, y, opt.task);
    auto model = std::make_unique<NetworkModel>(make_untrained(opt, X.cols));

    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> m(model->params_.size(), 0.0), v(model->params_.size(), 0.0);
    std::vector<double> grad;
    std::vector<std::size_t> order(X.rows);
    std::iota(order.begin(), order.end(), 0);

    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        std::mt19937_64 rng(mix_seed(opt.seed, 0xE90C + epoch));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
            std::size_t end = std::min(order.size(), start + opt.batch_size);
            std::vector<std::size_t> batch(order.begin() + start, order.begin() + end);
            model->loss_and_grad(X, y, batch, &grad);
            step++;
            double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t p = 0; p < grad.size(); ++p) {
                m[p] = beta1 * m[p] + (1.0 - beta1) * grad[p];
                v[p] = beta2 * v[p] + (1.0 - beta2) * grad[p] * grad[p];
                model->params_[p] -=
                    opt.learning_rate * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + eps);
            }
        }
    }
    return model;
}

std::unique_ptr<NetworkModel> NetworkModel::fit_model(const LearnerSpec& spec,
                                                      const Matrix& X,
                                                      const std::vector<double>& y) {
    Options opt;
    opt.task = spec.task;
    opt.seed = spec.seed;
    opt.hidden_layers = static_cast<std::size_t>(spec.params.get_num("hidden_layers", 2));
    opt.width = static_cast<std::size_t>(spec.params.get_num("width", 64));
    opt.learning_rate = spec.params.get_num("learning_rate", 1e-3);
    opt.batch_size = static_cast<std::size_t>(spec.params.get_num("batch_size", 256));
    opt.epochs = static_cast<std::size_t>(spec.params.get_num("epochs", 50));
    return fit_model(opt, X, y);
}

std::vector<double> NetworkModel::forward_scores(const Matrix& X) const {
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
        const std::size_t L = layer_sizes_.size() - 1;
        std::vector<double> a(X.row(r), X.row(r) + X.cols), next;
        std::size_t off = 0;
        for (std::size_t l = 0; l < L; ++l) {
            std::size_t in = layer_sizes_[l], nout = layer_sizes_[l + 1];
            next.assign(nout, 0.0);
            const double* W = params_.data() + off;
            const double* b = params_.data() + off + nout * in;
            for (std::size_t o = 0; o < nout; ++o) {
                double z = b[o];
                const double* w_row = W + o * in;
                for (std::size_t i = 0; i < in; ++i) z += w_row[i] * a[i];
                next[o] = (l + 1 < L) ? std::max(0.0, z) : z;
            }
            a.swap(next);
            off += nout * in + nout;
        }
        out[r] = a[0];
    }
    return out;
}

std::vector<double> NetworkModel::predict(const Matrix& X) const {
    check_schema(X);
    std::vector<double> scores = forward_scores(X);
    if (task_ == Task::Classify)
        for (double& s : scores) s = sigmoid(s) > 0.5 ? 1.0 : 0.0;
    return scores;
}

}  // namespace raingap
