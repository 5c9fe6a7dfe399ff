#include "levcycle/portfolio_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace levcycle {

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y, double budget) {
    Eigen::VectorXd z = y.cwiseMax(0.0);
    if (z.sum() <= budget) return z;
    std::vector<double> u(y.data(), y.data() + y.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        const double t = (cum - budget) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    return (y.array() - tau).cwiseMax(0.0).matrix();
}

namespace {

struct Inner {
    Eigen::VectorXd w;
    int iterations = 0;
};

// argmax r.w - mu w'Σw over the capped simplex (accelerated projected gradient)
Inner solve_penalized(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma, double lmax, double mu,
                      double budget, const Eigen::VectorXd& start, const OptOptions& opts) {
    const double lip = std::max(2.0 * mu * lmax, 1e-300);
    const double step = 1.0 / lip;
    Eigen::VectorXd w = project_capped_simplex(start, budget);
    Eigen::VectorXd y = w;
    double t = 1.0;
    Inner out;
    for (int k = 0; k < opts.max_inner; ++k) {
        const Eigen::VectorXd grad = r - 2.0 * mu * (sigma * y);
        Eigen::VectorXd next = project_capped_simplex(y + step * grad, budget);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double change = (next - w).lpNorm<Eigen::Infinity>();
        Eigen::VectorXd momentum = next + ((t - 1.0) / tn) * (next - w);
        // restart when the momentum step decreases the objective
        if ((r - mu * (sigma * next)).dot(next) < (r - mu * (sigma * w)).dot(w)) {
            momentum = next;
            t = 1.0;
        } else {
            t = tn;
        }
        w = std::move(next);
        y = std::move(momentum);
        out.iterations = k + 1;
        if (change <= opts.inner_tol * std::max(1.0, w.lpNorm<Eigen::Infinity>())) break;
    }
    out.w = std::move(w);
    return out;
}

}  // namespace

OptResult optimize_weights(const OptProblem& prob, const OptOptions& opts) {
    const auto n = prob.rhat.size();
    if (prob.sigma.rows() != n || prob.sigma.cols() != n)
        throw std::invalid_argument("optimize_weights: dimension mismatch");
    if (!prob.rhat.allFinite() || !prob.sigma.allFinite())
        throw std::invalid_argument("optimize_weights: non-finite input");
    if (!(prob.a > 0.0)) throw std::invalid_argument("optimize_weights: a must be positive");
    if (!(prob.w_c >= 0.0 && prob.w_c < 1.0))
        throw std::invalid_argument("optimize_weights: w_c must lie in [0,1)");

    const Eigen::MatrixXd sigma = 0.5 * (prob.sigma + prob.sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    const double lmax = n > 0 ? std::max(0.0, eig.eigenvalues().maxCoeff()) : 0.0;
    if (n > 0 && eig.eigenvalues().minCoeff() < -opts.psd_tol * std::max(1.0, lmax))
        throw NonPsdError("optimize_weights: covariance is not positive semidefinite");

    OptResult res;
    res.weights = Eigen::VectorXd::Zero(n);
    const double budget = 1.0 - prob.w_c;
    const double radius = std::max(prob.equity, 0.0) / prob.a;
    if (n == 0 || prob.rhat.maxCoeff() <= 0.0 || radius <= 0.0) return res;

    auto quad = [&](const Eigen::VectorXd& w) { return w.dot(sigma * w); };

    // Unpenalized optimum: budget spread over the best assets.
    const double rmax = prob.rhat.maxCoeff();
    Eigen::VectorXd lp = Eigen::VectorXd::Zero(n);
    int ties = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (prob.rhat[i] >= rmax - 1e-12 * std::abs(rmax)) ++ties;
    for (Eigen::Index i = 0; i < n; ++i)
        if (prob.rhat[i] >= rmax - 1e-12 * std::abs(rmax)) lp[i] = budget / ties;
    if (quad(lp) <= radius) {
        res.weights = lp;
        res.objective = prob.rhat.dot(lp);
        return res;
    }

    // Bracket the VaR multiplier, then bisect in log space.
    double mu_lo = 0.0, mu_hi = 1.0;
    Eigen::VectorXd w_hi;
    Eigen::VectorXd warm = lp;
    int outer = 0;
    while (true) {
        Inner in = solve_penalized(prob.rhat, sigma, lmax, mu_hi, budget, warm, opts);
        res.inner_iterations += in.iterations;
        ++outer;
        if (quad(in.w) <= radius) {
            w_hi = in.w;
            break;
        }
        mu_lo = mu_hi;
        warm = in.w;
        mu_hi *= 16.0;
        if (mu_hi > 1e300 || outer > opts.max_outer)
            throw ConvergenceError("optimize_weights: could not bracket the VaR multiplier",
                                   Eigen::VectorXd::Zero(n));
    }
    while (outer < opts.max_outer) {
        const double mid = mu_lo > 0.0 ? std::sqrt(mu_lo * mu_hi) : 0.5 * mu_hi;
        if (!(mid > mu_lo && mid < mu_hi) || (mu_hi - mu_lo) <= 1e-15 * mu_hi) break;
        Inner in = solve_penalized(prob.rhat, sigma, lmax, mid, budget, w_hi, opts);
        res.inner_iterations += in.iterations;
        ++outer;
        if (quad(in.w) <= radius) {
            mu_hi = mid;
            w_hi = in.w;
        } else {
            mu_lo = mid;
        }
    }
    res.outer_iterations = outer;
    res.weights = w_hi;
    res.objective = prob.rhat.dot(w_hi);
    if ((mu_hi - mu_lo) > 1e-15 * mu_hi && outer >= opts.max_outer)
        throw ConvergenceError("optimize_weights: iteration cap exceeded", w_hi);
    return res;
}

}  // namespace levcycle
