#include "raingap/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace raingap {

namespace {

double kernel_eval(SvmKernel kernel, double gamma, const double* a, const double* b,
                   std::size_t d) {
    if (kernel == SvmKernel::Linear) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
        return s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::exp(-gamma * s);
}

class QMatrix {
public:
    QMatrix(const SmoProblem& prob) : prob_(prob), n_(prob.sign.size()) {
        // Full kernel matrix when it fits comfortably; otherwise rows are
        // recomputed on demand with a small cyclic cache.
        if (n_ <= 3000) {
            full_.resize(n_ * n_);
            const Matrix& X = *prob_.points;
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    double k = kernel_eval(prob_.kernel, prob_.gamma,
                                           X.row(prob_.row_of[i]), X.row(prob_.row_of[j]),
                                           X.cols);
                    full_[i * n_ + j] = full_[j * n_ + i] = k;
                }
        } else {
            cache_rows_.assign(kCacheSlots, std::vector<double>());
            cache_idx_.assign(kCacheSlots, SIZE_MAX);
        }
    }

    // Row i of Q (sign-adjusted kernel).
    const double* q_row(std::size_t i, std::vector<double>& scratch) const {
        const double* k = k_row(i);
        scratch.resize(n_);
        for (std::size_t j = 0; j < n_; ++j)
            scratch[j] = prob_.sign[i] * prob_.sign[j] * k[j];
        return scratch.data();
    }

    double diag(std::size_t i) const {
        if (!full_.empty()) return full_[i * n_ + i];
        const Matrix& X = *prob_.points;
        return kernel_eval(prob_.kernel, prob_.gamma, X.row(prob_.row_of[i]),
                           X.row(prob_.row_of[i]), X.cols);
    }

private:
    static constexpr std::size_t kCacheSlots = 64;

    const double* k_row(std::size_t i) const {
        if (!full_.empty()) return full_.data() + i * n_;
        std::size_t slot = i % kCacheSlots;
        if (cache_idx_[slot] != i) {
            const Matrix& X = *prob_.points;
            cache_rows_[slot].resize(n_);
            for (std::size_t j = 0; j < n_; ++j)
                cache_rows_[slot][j] =
                    kernel_eval(prob_.kernel, prob_.gamma, X.row(prob_.row_of[i]),
                                X.row(prob_.row_of[j]), X.cols);
            cache_idx_[slot] = i;
        }
        return cache_rows_[slot].data();
    }

    const SmoProblem& prob_;
    std::size_t n_;
    std::vector<double> full_;
    mutable std::vector<std::vector<double>> cache_rows_;
    mutable std::vector<std::size_t> cache_idx_;
};

}  // namespace

SmoSolution smo_solve(const SmoProblem& prob) {
    const std::size_t n = prob.sign.size();
    if (n == 0) throw DataError("smo_solve: empty problem");
    QMatrix Q(prob);

    SmoSolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double> G = prob.linear;  // gradient at alpha = 0
    std::vector<double> qi, qj;

    const double C = prob.C;
    for (std::size_t iter = 0; iter < prob.max_iter; ++iter) {
        // Maximal violating pair.
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = SIZE_MAX, j = SIZE_MAX;
        for (std::size_t t = 0; t < n; ++t) {
            double yG = -prob.sign[t] * G[t];
            bool in_up = (prob.sign[t] > 0 && sol.alpha[t] < C) ||
                         (prob.sign[t] < 0 && sol.alpha[t] > 0);
            bool in_low = (prob.sign[t] < 0 && sol.alpha[t] < C) ||
                          (prob.sign[t] > 0 && sol.alpha[t] > 0);
            if (in_up && yG > g_max) {
                g_max = yG;
                i = t;
            }
            if (in_low && yG < g_min) {
                g_min = yG;
                j = t;
            }
        }
        sol.kkt_gap = g_max - g_min;
        sol.iterations = iter;
        if (sol.kkt_gap < prob.tol || i == SIZE_MAX || j == SIZE_MAX) {
            sol.converged = sol.kkt_gap < prob.tol;
            break;
        }

        const double* Qi = Q.q_row(i, qi);
        const double* Qj = Q.q_row(j, qj);
        double old_ai = sol.alpha[i], old_aj = sol.alpha[j];

        if (prob.sign[i] != prob.sign[j]) {
            double quad = Q.diag(i) + Q.diag(j) + 2.0 * Qi[j];
            if (quad <= 0) quad = 1e-12;
            double delta = (-G[i] - G[j]) / quad;
            double diff = sol.alpha[i] - sol.alpha[j];
            sol.alpha[i] += delta;
            sol.alpha[j] += delta;
            if (diff > 0 && sol.alpha[j] < 0) {
                sol.alpha[j] = 0;
                sol.alpha[i] = diff;
            } else if (diff <= 0 && sol.alpha[i] < 0) {
                sol.alpha[i] = 0;
                sol.alpha[j] = -diff;
            }
            if (diff > 0 && sol.alpha[i] > C) {
                sol.alpha[i] = C;
                sol.alpha[j] = C - diff;
            } else if (diff <= 0 && sol.alpha[j] > C) {
                sol.alpha[j] = C;
                sol.alpha[i] = C + diff;
            }
        } else {
            double quad = Q.diag(i) + Q.diag(j) - 2.0 * Qi[j];
            if (quad <= 0) quad = 1e-12;
            double delta = (G[i] - G[j]) / quad;
            double sum = sol.alpha[i] + sol.alpha[j];
            sol.alpha[i] -= delta;
            sol.alpha[j] += delta;
            if (sum > C) {
                if (sol.alpha[i] > C) {
                    sol.alpha[i] = C;
                    sol.alpha[j] = sum - C;
                } else if (sol.alpha[j] > C) {
                    sol.alpha[j] = C;
                    sol.alpha[i] = sum - C;
                }
            } else {
                if (sol.alpha[j] < 0) {
                    sol.alpha[j] = 0;
                    sol.alpha[i] = sum;
                } else if (sol.alpha[i] < 0) {
                    sol.alpha[i] = 0;
                    sol.alpha[j] = sum;
                }
            }
        }

        double d_ai = sol.alpha[i] - old_ai;
        double d_aj = sol.alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) G[t] += Qi[t] * d_ai + Qj[t] * d_aj;
    }

    // rho as in the standard KKT interval midpoint / free-variable average.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t nr_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double yG = prob.sign[t] * G[t];
        if (sol.alpha[t] >= C) {
            if (prob.sign[t] < 0)
                ub = std::min(ub, yG);
            else
                lb = std::max(lb, yG);
        } else if (sol.alpha[t] <= 0) {
            if (prob.sign[t] > 0)
                ub = std::min(ub, yG);
            else
                lb = std::max(lb, yG);
        } else {
            nr_free++;
            sum_free += yG;
        }
    }
    sol.rho = nr_free > 0 ? sum_free / nr_free : (ub + lb) / 2.0;
    return sol;
}

std::unique_ptr<SvmModel> SvmModel::fit_model(const Options& opt, const Matrix& X,
                                              const std::vector<double>& y) {
    check_training_inputs(X, y, opt.task);
    auto model = std::make_unique<SvmModel>();
    model->task_ = opt.task;
    model->opt_ = opt;
    model->n_inputs_ = X.cols;

    // Cost control: SMO on very large training sets is capped by a seeded
    // subsample; the cap is surfaced through capped().
    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), 0);
    if (X.rows > opt.train_cap) {
        std::mt19937_64 rng(mix_seed(opt.seed, 0x5f3759df));
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(opt.train_cap);
        std::sort(rows.begin(), rows.end());
        model->capped_ = true;
    }
    const std::size_t m = rows.size();

    SmoProblem prob;
    prob.points = &X;
    prob.C = opt.C;
    prob.kernel = opt.kernel;
    prob.gamma = opt.gamma;

    if (opt.task == Task::Classify) {
        prob.row_of = rows;
        prob.sign.resize(m);
        prob.linear.assign(m, -1.0);
        for (std::size_t t = 0; t < m; ++t) prob.sign[t] = y[rows[t]] > 0.5 ? 1.0 : -1.0;
    } else {
        prob.row_of.resize(2 * m);
        prob.sign.resize(2 * m);
        prob.linear.resize(2 * m);
        for (std::size_t t = 0; t < m; ++t) {
            prob.row_of[t] = rows[t];
            prob.row_of[m + t] = rows[t];
            prob.sign[t] = 1.0;
            prob.sign[m + t] = -1.0;
            prob.linear[t] = opt.epsilon - y[rows[t]];
            prob.linear[m + t] = opt.epsilon + y[rows[t]];
        }
    }

    model->solution_ = smo_solve(prob);
    model->rho_ = model->solution_.rho;

    // Collapse to support vectors with beta = sign * alpha (alpha - alpha*
    // for regression).
    std::vector<double> beta(m, 0.0);
    if (opt.task == Task::Classify) {
        for (std::size_t t = 0; t < m; ++t)
            beta[t] = prob.sign[t] * model->solution_.alpha[t];
    } else {
        for (std::size_t t = 0; t < m; ++t)
            beta[t] = model->solution_.alpha[t] - model->solution_.alpha[m + t];
    }
    std::size_t n_sv = 0;
    for (double b : beta)
        if (b != 0.0) n_sv++;
    model->sv_ = Matrix(n_sv, X.cols);
    model->sv_coef_.reserve(n_sv);
    std::size_t out = 0;
    for (std::size_t t = 0; t < m; ++t) {
        if (beta[t] == 0.0) continue;
        std::copy(X.row(rows[t]), X.row(rows[t]) + X.cols, model->sv_.row(out));
        model->sv_coef_.push_back(beta[t]);
        out++;
    }
    return model;
}

std::unique_ptr<SvmModel> SvmModel::fit_model(const LearnerSpec& spec, const Matrix& X,
                                              const std::vector<double>& y) {
    Options opt;
    opt.task = spec.task;
    opt.seed = spec.seed;
    opt.C = spec.params.get_num("C", 10.0);
    opt.gamma = spec.params.get_num("gamma", 0.1);
    opt.epsilon = spec.params.get_num("epsilon", 0.1);
    opt.train_cap =
        static_cast<std::size_t>(spec.params.get_num("train_cap", 20000));
    std::string kernel = spec.params.get_cat("kernel", "rbf");
    if (kernel == "linear")
        opt.kernel = SvmKernel::Linear;
    else if (kernel == "rbf")
        opt.kernel = SvmKernel::Rbf;
    else
        throw ConfigError("svm: unknown kernel " + kernel);
    return fit_model(opt, X, y);
}

std::vector<double> SvmModel::predict(const Matrix& X) const {
    check_schema(X);
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double f = -rho_;
        for (std::size_t s = 0; s < sv_coef_.size(); ++s)
            f += sv_coef_[s] *
                 kernel_eval(opt_.kernel, opt_.gamma, sv_.row(s), X.row(i), X.cols);
        out[i] = task_ == Task::Classify ? (f > 0.0 ? 1.0 : 0.0) : f;
    }
    return out;
}

}  // namespace raingap
