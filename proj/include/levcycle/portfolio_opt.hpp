#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace levcycle {

struct OptProblem {
    Eigen::VectorXd rhat;
    Eigen::MatrixXd sigma;
    double equity = 1.0;
    double a = 1.0;
    double w_c = 0.0;
};

struct OptOptions {
    int max_outer = 400;
    int max_inner = 50000;
    double inner_tol = 1e-15;
    double psd_tol = 1e-10;
};

struct OptResult {
    Eigen::VectorXd weights;
    double objective = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
};

class NonPsdError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const Eigen::VectorXd& best_so_far() const { return best_; }

private:
    Eigen::VectorXd best_;
};

// Euclidean projection onto {w >= 0, sum(w) <= budget}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y, double budget);

// max rhat.w  s.t.  a w'Σw <= E,  w >= 0,  sum(w) <= 1 - w_c
OptResult optimize_weights(const OptProblem& prob, const OptOptions& opts = {});

}  // namespace levcycle
