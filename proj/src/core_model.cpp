#include "levcycle/core_model.hpp"

#include "levcycle/kernels.hpp"
#include "levcycle/portfolio_opt.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace levcycle {

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::ok:
            return "ok";
        case RunStatus::bankrupt:
            return "bankrupt";
        case RunStatus::unstable:
            return "unstable";
        case RunStatus::degenerate:
            return "degenerate";
    }
    return "unknown";
}

void validate(const SimConfig& cfg) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    require(cfg.delta > 0.0 && cfg.delta <= 1.0, "delta must lie in (0,1]");
    require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "gamma must lie in (0,1]");
    require(cfg.w_c > 0.0 && cfg.w_c < 1.0, "w_c must lie in (0,1)");
    require(cfg.alpha > 0.0, "alpha must be positive");
    require(cfg.sigma0 >= 0.0, "sigma0 must be nonnegative");
    require(cfg.E0 > 0.0, "E0 must be positive");
    require(cfg.lambda0 >= 1.0, "lambda0 must be at least 1");
    require(cfg.A_N0 > 0.0, "A_N0 must be positive");
    require(cfg.N_b >= 1, "N_b must be at least 1");
    require(cfg.N_S >= 1, "N_S must be at least 1");
    require(cfg.pi0 > 0.0, "pi0 must be positive");
    require(cfg.phi >= 0.0 && cfg.eta >= 0.0, "volatilities must be nonnegative");
}

namespace {

std::span<double> as_span(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<double> as_span(Mat& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> as_span(const Mat& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

Vec update_dividends(const Vec& pi, double mu, double phi, Rng& rng) {
    Vec out(pi.size());
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
        const double eps = rng.normal();
        out[i] = std::max(pi[i] * (1.0 + mu + phi * eps), kPositiveFloor);
    }
    return out;
}

Vec update_div_price_estimate(const Vec& rhat, const Vec& pi, const Vec& p, double gamma) {
    if (rhat.size() != pi.size() || pi.size() != p.size())
        throw DimensionError("update_div_price_estimate: size mismatch");
    if ((p.array() <= 0.0).any()) throw EstimationError("update_div_price_estimate: nonpositive price");
    const Vec ratio = pi.cwiseQuotient(p);
    Vec out = rhat;
    kernels::ema_update(as_span(out), as_span(ratio), gamma);
    return out;
}

Vec update_mean_estimate(const Vec& mu_hat, const Vec& x, double delta) {
    if (mu_hat.size() != x.size()) throw DimensionError("update_mean_estimate: size mismatch");
    Vec out = mu_hat;
    kernels::ema_update(as_span(out), as_span(x), delta);
    return out;
}

Mat update_covariance(const Mat& sigma, const Vec& x, const Vec& mu_hat, double delta) {
    if (sigma.rows() != x.size() || sigma.cols() != x.size() || mu_hat.size() != x.size())
        throw DimensionError("update_covariance: size mismatch");
    Mat out = sigma;
    const Vec d = x - mu_hat;
    kernels::ewma_outer_update(as_span(out), as_span(d), delta);
    return out;
}

Vec portfolio_weights_softmax(const Vec& rhat, const Mat& sigma, double beta, double w_c,
                              double var_floor) {
    if (sigma.rows() != rhat.size() || sigma.cols() != rhat.size())
        throw DimensionError("portfolio_weights_softmax: size mismatch");
    Vec s(rhat.size());
    for (Eigen::Index i = 0; i < rhat.size(); ++i)
        s[i] = beta * rhat[i] / std::sqrt(std::max(sigma(i, i), var_floor));
    const double smax = s.maxCoeff();
    Vec e = (s.array() - smax).exp().matrix();
    return (1.0 - w_c) * e / e.sum();
}

double portfolio_variance(const Vec& w, const Mat& sigma) {
    if (sigma.rows() != w.size() || sigma.cols() != w.size())
        throw DimensionError("portfolio_variance: size mismatch");
    return std::max(0.0, kernels::quad_form(as_span(w), as_span(sigma)));
}

double target_leverage(double sigma_p2, const LeveragePolicy& policy) {
    double v = std::max(sigma_p2, 0.0);
    if (policy.b < 0.0 && policy.sigma0 == 0.0) v = std::max(v, policy.var_floor);
    return policy.alpha * std::pow(v + policy.sigma0, policy.b);
}

double erf_inv(double y) {
    if (!(y > -1.0 && y < 1.0)) throw std::domain_error("erf_inv: argument must lie in (-1,1)");
    double x = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double f = std::erf(x) - y;
        const double step = f / (2.0 / std::sqrt(M_PI) * std::exp(-x * x));
        x -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

double alpha_gaussian(double a) { return 1.0 / (std::sqrt(2.0) * erf_inv(2.0 * a - 1.0)); }

double alpha_chebyshev(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("alpha_chebyshev: a must lie in (0,1)");
    // P(X > k sigma) = 1/(2k^2)
    return std::sqrt(2.0 * (1.0 - a));
}

double balance_sheet_delta(double target, double assets, double liabilities, bool active) {
    const double equity = assets - liabilities;
    if (!(equity > 0.0)) throw BankruptcyError("balance_sheet_delta: nonpositive equity");
    if (!active) return 0.0;
    return target * equity - assets;
}

Vec update_noise_trader_v(const Vec& v, const Vec& rhat, double rho, double zeta, double eta, Rng& rng) {
    if (v.size() != rhat.size()) throw DimensionError("update_noise_trader_v: size mismatch");
    const double n = static_cast<double>(v.size());
    const double rbar = rhat.mean();
    Vec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double eps = rng.normal();
        const double growth = rho * (1.0 / n - v[i]) + zeta * (rhat[i] - rbar) + eta * eps;
        out[i] = std::max(v[i] * (1.0 + growth), kPositiveFloor);
    }
    return out;
}

Vec noise_trader_weights(const Vec& v, double w_c) { return (1.0 - w_c) * v / v.sum(); }

Vec clear_market(const Mat& W, const Mat& N, const Vec& c, const Vec& dB) {
    const auto nf = W.rows();
    const auto ni = W.cols();
    if (N.rows() != ni || N.cols() != nf || c.size() != ni || dB.size() != ni)
        throw DimensionError("clear_market: size mismatch");
    if (!((c.array() > 0.0).any())) throw ClearingError(ClearingError::Kind::degenerate, "no investor holds cash");
    const Mat U = Mat::Identity(nf, nf) - W * N;
    Eigen::PartialPivLU<Mat> lu(U);
    if (!(lu.rcond() > 1e-14)) throw ClearingError(ClearingError::Kind::singular, "clearing matrix is singular");
    const Vec p = lu.solve(W * (c + dB));
    if (!p.allFinite() || (p.array() <= 0.0).any())
        throw ClearingError(ClearingError::Kind::degenerate, "nonpositive clearing price");
    if (clearing_residual(W, N, c, dB, p) > 1e-9)
        throw ClearingError(ClearingError::Kind::singular, "clearing residual too large");
    return p;
}

double clearing_residual(const Mat& W, const Mat& N, const Vec& c, const Vec& dB, const Vec& p) {
    const Vec rhs = W * (N * p + c + dB);
    return (p - rhs).norm() / std::max(p.norm(), 1e-300);
}

double bank_assets(const BankState& bank, const Vec& prices) { return bank.cash + bank.holdings.dot(prices); }

double bank_equity(const BankState& bank, const Vec& prices) {
    return bank_assets(bank, prices) - bank.liabilities;
}

Mat ownership_matrix(const std::vector<BankState>& banks, const NoiseTraderState& noise) {
    const auto nf = noise.holdings.size();
    Mat N(static_cast<Eigen::Index>(banks.size()) + 1, nf);
    for (std::size_t j = 0; j < banks.size(); ++j) N.row(static_cast<Eigen::Index>(j)) = banks[j].holdings.transpose();
    N.row(N.rows() - 1) = noise.holdings.transpose();
    return N;
}

bool settle(std::vector<BankState>& banks, NoiseTraderState& noise, const Vec& /*old_prices*/,
            const Vec& new_prices, const SettleInput& in) {
    bool solvent = true;
    const auto nb = static_cast<Eigen::Index>(banks.size());
    for (Eigen::Index j = 0; j < nb; ++j) {
        BankState& bank = banks[static_cast<std::size_t>(j)];
        if (bank.bankrupt) continue;
        const double db = in.delta_b[j];
        const double assets = bank.cash + bank.holdings.dot(new_prices) + db;
        const Vec w = in.weights.col(j);
        bank.holdings = (w * assets).cwiseQuotient(new_prices);
        bank.cash = assets - w.sum() * assets;
        bank.liabilities += db;
        if (assets - bank.liabilities < 0.0) {
            bank.bankrupt = true;
            solvent = false;
        }
    }
    const double assets = noise.cash + noise.holdings.dot(new_prices) + in.delta_b[nb];
    const Vec w = in.weights.col(nb);
    noise.holdings = (w * assets).cwiseQuotient(new_prices);
    noise.cash = assets - (w * assets).sum();
    return solvent;
}

SimState initial_state(const SimConfig& cfg) {
    validate(cfg);
    const auto nf = static_cast<Eigen::Index>(cfg.N_S);
    const double assets_bank = cfg.lambda0 * cfg.E0;
    const Vec w0 = Vec::Constant(nf, (1.0 - cfg.w_c) / static_cast<double>(nf));
    const double total = assets_bank * cfg.N_b + cfg.A_N0;

    SimState s;
    s.market.prices = w0 * total;
    s.market.prev_prices = s.market.prices;
    s.market.dividends = Vec::Constant(nf, cfg.pi0);

    for (int j = 0; j < cfg.N_b; ++j) {
        BankState b;
        b.cash = cfg.w_c * assets_bank;
        b.holdings = (w0 * assets_bank).cwiseQuotient(s.market.prices);
        b.liabilities = assets_bank - cfg.E0;
        b.div_price_est = s.market.dividends.cwiseQuotient(s.market.prices);
        b.mean_est = Vec::Zero(nf);
        b.cov_est = Mat::Identity(nf, nf) * (cfg.phi * cfg.phi);
        b.active = cfg.active;
        s.banks.push_back(std::move(b));
    }
    s.noise.cash = cfg.w_c * cfg.A_N0;
    s.noise.holdings = (w0 * cfg.A_N0).cwiseQuotient(s.market.prices);
    s.noise.v = Vec::Constant(nf, 1.0 / static_cast<double>(nf));

    s.last.bank_weights = w0;
    s.last.noise_weights = w0;
    s.last.sigma_p2 = portfolio_variance(w0, s.banks.front().cov_est);
    s.last.target_leverage = cfg.lambda0;
    return s;
}

namespace {

bool exceeds(double x) { return !std::isfinite(x) || std::abs(x) > kInstabilityThreshold; }

Vec allocate(const BankState& bank, const SimConfig& cfg, double assets, double equity) {
    if (cfg.allocator == Allocator::softmax)
        return portfolio_weights_softmax(bank.div_price_est, bank.cov_est, cfg.beta, cfg.w_c);
    OptProblem prob;
    prob.rhat = bank.div_price_est;
    prob.sigma = bank.cov_est;
    prob.equity = equity;
    prob.w_c = cfg.w_c;
    // a w'Σw <= E  <=>  assets * sigma_P / alpha <= E
    prob.a = cfg.var_scale > 0.0 ? cfg.var_scale : assets * assets / (cfg.alpha * cfg.alpha * equity);
    try {
        return optimize_weights(prob).weights;
    } catch (const ConvergenceError& e) {
        return e.best_so_far();
    }
}

}  // namespace

SimState step(const SimState& state, const SimConfig& cfg, Rng& rng) {
    SimState s = state;
    if (s.status != RunStatus::ok) return s;
    const auto nf = static_cast<Eigen::Index>(cfg.N_S);
    const auto nb = static_cast<Eigen::Index>(s.banks.size());
    const LeveragePolicy policy{cfg.alpha, cfg.b, cfg.sigma0, kVarFloor};

    // (1) dividends
    s.market.dividends = update_dividends(s.market.dividends, cfg.mu, cfg.phi, rng);
    // (2) log returns
    const Vec x = (s.market.prices.array() / s.market.prev_prices.array()).log().matrix();

    Mat W(nf, nb + 1);
    Vec dB = Vec::Zero(nb + 1);
    Vec c(nb + 1);
    for (Eigen::Index j = 0; j < nb; ++j) {
        BankState& bank = s.banks[static_cast<std::size_t>(j)];
        c[j] = bank.cash;
        if (bank.bankrupt) {
            W.col(j).setZero();
            continue;
        }
        // (3) estimators
        bank.mean_est = update_mean_estimate(bank.mean_est, x, cfg.delta);
        bank.cov_est = update_covariance(bank.cov_est, x, bank.mean_est, cfg.delta);
        bank.div_price_est = update_div_price_estimate(bank.div_price_est, s.market.dividends, s.market.prices, cfg.gamma);
        // (4) weights, (5) leverage target
        const double assets = bank_assets(bank, s.market.prices);
        const double equity = assets - bank.liabilities;
        if (!(equity > 0.0)) {
            bank.bankrupt = true;
            s.status = RunStatus::bankrupt;
            return s;
        }
        const Vec w = allocate(bank, cfg, assets, equity);
        W.col(j) = w;
        const double sp2 = portfolio_variance(w, bank.cov_est);
        const double lev = target_leverage(sp2, policy);
        double db = balance_sheet_delta(lev, assets, bank.liabilities, bank.active);
        db = std::max(db, -bank.liabilities);
        dB[j] = db;
        if (j == 0) {
            s.last.bank_weights = w;
            s.last.sigma_p2 = sp2;
            s.last.target_leverage = lev;
            s.last.delta_b = db;
        }
        if (exceeds(lev) || exceeds(db)) {
            s.status = RunStatus::unstable;
            return s;
        }
    }
    s.noise.v = update_noise_trader_v(s.noise.v, s.banks.front().div_price_est, cfg.rho, cfg.zeta, cfg.eta, rng);
    W.col(nb) = noise_trader_weights(s.noise.v, cfg.w_c);
    s.last.noise_weights = W.col(nb);
    c[nb] = s.noise.cash;

    // (6) clearing
    const Mat N = ownership_matrix(s.banks, s.noise);
    Vec p;
    try {
        p = clear_market(W, N, c, dB);
    } catch (const ClearingError& e) {
        s.status = e.kind() == ClearingError::Kind::degenerate ? RunStatus::degenerate : RunStatus::unstable;
        return s;
    }
    if ((p.array().abs() > kInstabilityThreshold).any()) {
        s.status = RunStatus::unstable;
        return s;
    }
    s.last.clearing_residual = clearing_residual(W, N, c, dB, p);

    // (7) settlement
    const bool solvent = settle(s.banks, s.noise, s.market.prices, p, SettleInput{W, dB});
    s.market.prev_prices = s.market.prices;
    s.market.prices = p;
    ++s.t;
    if (!solvent) s.status = RunStatus::bankrupt;
    return s;
}

namespace {

void record(FullSeries& out, const SimState& s) {
    const BankState& bank = s.banks.front();
    const double assets = bank_assets(bank, s.market.prices);
    const double equity = assets - bank.liabilities;
    out.prices.push_back(s.market.prices);
    out.dividends.push_back(s.market.dividends);
    out.rhat.push_back(bank.div_price_est);
    out.weights.push_back(s.last.bank_weights);
    out.leverage.push_back((assets - bank.cash) / equity);
    out.sigma_p2.push_back(s.last.sigma_p2);
    out.equity_bank.push_back(equity);
    out.equity_nt.push_back(s.noise.cash + s.noise.holdings.dot(s.market.prices));
}

}  // namespace

FullSeries run_full(const SimConfig& cfg, const StepObserver& observer) {
    Rng rng(cfg.seed);
    SimState s = initial_state(cfg);
    FullSeries out;
    out.n_stocks = static_cast<std::size_t>(cfg.N_S);
    record(out, s);
    if (observer) observer(s);
    for (std::size_t t = 0; t < cfg.T; ++t) {
        SimState next = step(s, cfg, rng);
        if (next.status != RunStatus::ok && next.t == s.t) {
            out.status = next.status;
            break;
        }
        s = std::move(next);
        record(out, s);
        if (observer) observer(s);
        out.steps_completed = s.t;
        if (s.status != RunStatus::ok) {
            out.status = s.status;
            break;
        }
    }
    return out;
}

FullSeries run_full_with_optimizer(SimConfig cfg, const StepObserver& observer) {
    cfg.allocator = Allocator::optimizer;
    return run_full(cfg, observer);
}

}  // namespace levcycle
