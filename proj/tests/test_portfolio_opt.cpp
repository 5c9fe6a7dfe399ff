#include "levcycle/portfolio_opt.hpp"
#include "levcycle/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace levcycle;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool feasible(const OptProblem& p, const VectorXd& w, double tol) {
    if ((w.array() < -tol).any()) return false;
    if (w.sum() > 1.0 - p.w_c + tol) return false;
    return p.a * w.dot(p.sigma * w) <= p.equity * (1.0 + tol) + tol;
}

// Grid over (w1, w2) with an exact solve for w3.
double grid_oracle(const OptProblem& p, double pitch) {
    const double budget = 1.0 - p.w_c;
    const double cap = p.equity / p.a;
    const MatrixXd& S = p.sigma;
    double best = 0.0;
    const int steps = static_cast<int>(std::floor(budget / pitch + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        const double w1 = i * pitch;
        for (int j = 0; i + j <= steps; ++j) {
            const double w2 = j * pitch;
            const double base = S(0, 0) * w1 * w1 + 2 * S(0, 1) * w1 * w2 + S(1, 1) * w2 * w2 - cap;
            const double lin = 2 * (S(0, 2) * w1 + S(1, 2) * w2);
            const double quad = S(2, 2);
            const double disc = lin * lin - 4 * quad * base;
            if (disc < 0) continue;
            const double lo = (-lin - std::sqrt(disc)) / (2 * quad);
            const double hi = (-lin + std::sqrt(disc)) / (2 * quad);
            const double a = std::max(lo, 0.0);
            const double b = std::min(hi, budget - w1 - w2);
            if (a > b) continue;
            const double w3 = p.rhat(2) > 0 ? b : a;
            best = std::max(best, p.rhat(0) * w1 + p.rhat(1) * w2 + p.rhat(2) * w3);
        }
    }
    return best;
}

OptProblem random_problem(Rng& rng, int n) {
    OptProblem p;
    p.rhat.resize(n);
    for (int i = 0; i < n; ++i) p.rhat(i) = -0.01 + 0.04 * rng.uniform();
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = rng.normal();
    p.sigma = 1e-4 * (B * B.transpose() + 0.1 * MatrixXd::Identity(n, n));
    p.equity = 1.0;
    p.a = std::exp(std::log(1e2) + std::log(1e4) * rng.uniform());
    p.w_c = 0.3 * rng.uniform();
    return p;
}

}  // namespace

TEST_CASE("single asset takes the full budget when the risk cap is loose") {
    OptProblem p;
    p.rhat = VectorXd::Constant(1, 0.02);
    p.sigma = MatrixXd::Constant(1, 1, 1e-4);
    p.a = 1.0;
    const OptResult r = optimize_weights(p);
    CHECK(r.weights(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("symmetric assets receive equal weights") {
    OptProblem p;
    p.rhat = VectorXd::Constant(3, 0.01);
    p.sigma = 1e-4 * (MatrixXd::Identity(3, 3) + 0.3 * MatrixXd::Ones(3, 3));
    p.a = 1e5;
    const OptResult r = optimize_weights(p);
    CHECK(r.weights(0) == doctest::Approx(r.weights(1)).epsilon(1e-7));
    CHECK(r.weights(1) == doctest::Approx(r.weights(2)).epsilon(1e-7));
    CHECK(p.a * r.weights.dot(p.sigma * r.weights) == doctest::Approx(p.equity).epsilon(1e-7));
}

TEST_CASE("nonpositive expected returns give zero weights") {
    OptProblem p;
    p.rhat = VectorXd::Constant(2, -0.01);
    p.rhat(1) = 0.0;
    p.sigma = 1e-4 * MatrixXd::Identity(2, 2);
    const OptResult r = optimize_weights(p);
    CHECK(r.weights.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-PSD covariance is rejected") {
    OptProblem p;
    p.rhat = VectorXd::Constant(2, 0.01);
    p.sigma.resize(2, 2);
    p.sigma << 1e-4, 2e-4, 2e-4, 1e-4;
    CHECK_THROWS_AS(optimize_weights(p), NonPsdError);
}

TEST_CASE("solution is invariant to scaling of rhat") {
    Rng rng(11);
    for (int k = 0; k < 5; ++k) {
        OptProblem p = random_problem(rng, 3);
        OptProblem q = p;
        q.rhat *= 7.5;
        const VectorXd a = optimize_weights(p).weights;
        const VectorXd b = optimize_weights(q).weights;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("optimizer matches the grid oracle on random instances") {
    Rng rng(2024);
    for (int k = 0; k < 8; ++k) {
        const OptProblem p = random_problem(rng, 3);
        const OptResult r = optimize_weights(p);
        CHECK(feasible(p, r.weights, 1e-9));
        const double obj = p.rhat.dot(r.weights);
        const double grid = grid_oracle(p, 1e-3);
        CHECK(obj >= grid - 1e-10);
        CHECK(obj <= grid + 2e-3 * p.rhat.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("projection onto the capped simplex") {
    VectorXd y(3);
    y << 0.5, -0.2, 0.3;
    CHECK((project_capped_simplex(y, 1.0) - VectorXd((VectorXd(3) << 0.5, 0.0, 0.3).finished())).norm() < 1e-15);
    y << 1.0, 1.0, 0.0;
    const VectorXd w = project_capped_simplex(y, 1.0);
    CHECK(w(0) == doctest::Approx(0.5));
    CHECK(w(1) == doctest::Approx(0.5));
    CHECK(w(2) == 0.0);
}
