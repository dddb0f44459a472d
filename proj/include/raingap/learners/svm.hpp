#pragma once

#include "raingap/learners/learner.hpp"

namespace raingap {

enum class SvmKernel { Linear, Rbf };

// Solves min 0.5 a^T Q a + p^T a  s.t. sign^T a = 0, 0 <= a <= C, with
// Q_ij = sign_i sign_j K(i, j), by sequential minimal optimization with
// maximal-violating-pair working-set selection.
struct SmoProblem {
    const Matrix* points = nullptr;          // kernel input rows
    std::vector<std::size_t> row_of;         // problem index -> matrix row
    std::vector<double> sign;                // +1 / -1 per variable
    std::vector<double> linear;              // p
    double C = 1.0;
    SvmKernel kernel = SvmKernel::Rbf;
    double gamma = 0.1;
    double tol = 1e-3;
    std::size_t max_iter = 300000;
};

struct SmoSolution {
    std::vector<double> alpha;
    double rho = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_gap = 0.0;  // final max violation
};

SmoSolution smo_solve(const SmoProblem& prob);

class SvmModel final : public FittedModel {
public:
    struct Options {
        Task task = Task::Classify;
        double C = 10.0;
        double gamma = 0.1;
        SvmKernel kernel = SvmKernel::Rbf;
        double epsilon = 0.1;            // epsilon-insensitive tube (regression)
        std::size_t train_cap = 20000;   // subsample above this many rows
        std::uint64_t seed = 0;
    };

    static std::unique_ptr<SvmModel> fit_model(const Options& opt, const Matrix& X,
                                               const std::vector<double>& y);
    static std::unique_ptr<SvmModel> fit_model(const LearnerSpec& spec, const Matrix& X,
                                               const std::vector<double>& y);

    std::vector<double> predict(const Matrix& X) const override;
    std::size_t n_inputs() const override { return n_inputs_; }
    std::string family_tag() const override { return "svm"; }

    // beta_i = sign_i * alpha_i per support vector; f(x) = sum beta_i K(sv_i, x) - rho.
    const std::vector<double>& sv_coeffs() const { return sv_coef_; }
    const Matrix& support_vectors() const { return sv_; }
    double rho() const { return rho_; }
    const SmoSolution& solution() const { return solution_; }
    bool capped() const { return capped_; }

private:
    Task task_ = Task::Classify;
    Options opt_;
    std::size_t n_inputs_ = 0;
    Matrix sv_;
    std::vector<double> sv_coef_;
    double rho_ = 0.0;
    SmoSolution solution_;
    bool capped_ = false;
};

}  // namespace raingap
