#pragma once

#include "levcycle/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levcycle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kVarFloor = 1e-12;
inline constexpr double kPositiveFloor = 1e-12;
inline constexpr double kInstabilityThreshold = 1e12;

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BankruptcyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ClearingError : public std::runtime_error {
public:
    enum class Kind { singular, degenerate };
    ClearingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

enum class RunStatus { ok, bankrupt, unstable, degenerate };

const char* status_name(RunStatus s);

struct LeveragePolicy {
    double alpha = 0.1;
    double b = -0.5;
    double sigma0 = 0.0;
    double var_floor = kVarFloor;
};

enum class Allocator { softmax, optimizer };

struct BankState {
    double cash = 0.0;
    Vec holdings;
    double liabilities = 0.0;
    Vec div_price_est;
    Vec mean_est;
    Mat cov_est;
    bool active = true;
    bool bankrupt = false;
};

struct NoiseTraderState {
    double cash = 0.0;
    Vec holdings;
    Vec v;
};

struct MarketState {
    Vec prices;
    Vec prev_prices;
    Vec dividends;
};

struct SimConfig {
    double delta = 0.1;
    double alpha = 0.1;
    double b = -0.5;
    double sigma0 = 0.0;
    double E0 = 23.0;
    double lambda0 = 5.0;
    double w_c = 0.2;
    double gamma = 0.1;
    double beta = 0.1;
    int N_b = 1;
    double A_N0 = 115.0;
    double rho = 0.05;
    double zeta = 5.0;
    double eta = 0.2;
    double mu = 1e-5;
    double phi = 0.05;
    int N_S = 3;
    double pi0 = 1.0;
    bool active = true;
    Allocator allocator = Allocator::softmax;
    // VaR scale for the optimizer; <= 0 derives it from the current balance sheet
    double var_scale = 0.0;
    std::size_t T = 2000;
    std::uint64_t seed = 0;
};

void validate(const SimConfig& cfg);

struct StepInfo {
    Vec bank_weights;
    Vec noise_weights;
    double sigma_p2 = 0.0;
    double target_leverage = 0.0;
    double delta_b = 0.0;
    double clearing_residual = 0.0;
};

struct SimState {
    std::size_t t = 0;
    MarketState market;
    std::vector<BankState> banks;
    NoiseTraderState noise;
    RunStatus status = RunStatus::ok;
    StepInfo last;
};

// Elementary operations
Vec update_dividends(const Vec& pi, double mu, double phi, Rng& rng);
Vec update_div_price_estimate(const Vec& rhat, const Vec& pi, const Vec& p, double gamma);
Vec update_mean_estimate(const Vec& mu_hat, const Vec& x, double delta);
Mat update_covariance(const Mat& sigma, const Vec& x, const Vec& mu_hat, double delta);
Vec portfolio_weights_softmax(const Vec& rhat, const Mat& sigma, double beta, double w_c,
                              double var_floor = kVarFloor);
double portfolio_variance(const Vec& w, const Mat& sigma);
double target_leverage(double sigma_p2, const LeveragePolicy& policy);
double erf_inv(double y);
// alpha = 1/VaR per unit sigma at confidence a
double alpha_gaussian(double a);
double alpha_chebyshev(double a);
double balance_sheet_delta(double target, double assets, double liabilities, bool active = true);
Vec update_noise_trader_v(const Vec& v, const Vec& rhat, double rho, double zeta, double eta, Rng& rng);
Vec noise_trader_weights(const Vec& v, double w_c);
// W: N_f x I weights, N: I x N_f ownership, c and dB: length I
Vec clear_market(const Mat& W, const Mat& N, const Vec& c, const Vec& dB);
double clearing_residual(const Mat& W, const Mat& N, const Vec& c, const Vec& dB, const Vec& p);

struct SettleInput {
    Mat weights;  // N_f x I, bank columns first, noise trader last
    Vec delta_b;  // length I
};

// Returns false if any bank ends with negative equity.
bool settle(std::vector<BankState>& banks, NoiseTraderState& noise, const Vec& old_prices,
            const Vec& new_prices, const SettleInput& in);

double bank_assets(const BankState& bank, const Vec& prices);
double bank_equity(const BankState& bank, const Vec& prices);
Mat ownership_matrix(const std::vector<BankState>& banks, const NoiseTraderState& noise);

SimState initial_state(const SimConfig& cfg);
SimState step(const SimState& state, const SimConfig& cfg, Rng& rng);

struct FullSeries {
    std::size_t n_stocks = 0;
    std::vector<Vec> prices;
    std::vector<Vec> dividends;
    std::vector<Vec> rhat;
    std::vector<Vec> weights;
    std::vector<double> leverage;
    std::vector<double> sigma_p2;
    std::vector<double> equity_bank;
    std::vector<double> equity_nt;
    RunStatus status = RunStatus::ok;
    std::size_t steps_completed = 0;

    std::size_t rows() const { return prices.size(); }
};

using StepObserver = std::function<void(const SimState&)>;

FullSeries run_full(const SimConfig& cfg, const StepObserver& observer = {});
FullSeries run_full_with_optimizer(SimConfig cfg, const StepObserver& observer = {});

}  // namespace levcycle
