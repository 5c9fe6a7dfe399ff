#pragma once

#include "levcycle/core_model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace levcycle {

enum class NoiseMode { deterministic, stochastic };

const char* mode_name(NoiseMode m);

struct PolicyRuleParams {
    double alpha0 = 0.1;
    double rho_alpha = 0.5;
    double delta_alpha = 0.1;
    double theta = 0.0;
};

struct RedistributionParams {
    double xi = 1.2;
    double E0 = 10.0;
};

struct VarEquityParams {
    double alpha = 0.1;
    double delta = 0.1;
    double b = -0.5;
    double sigma0 = 0.0;
    double E0 = 10.0;
    double lambda0 = 5.0;
    double w_B = 0.05;
    double n0 = 0.1;
    double xi = 1.2;
    double rho = 0.9;
    double eta = 0.01;
    bool policy = false;
    double rho_alpha = 0.5;
    double delta_alpha = 0.1;
    double theta = 0.0;
    double sigma2_0 = 1e-4;
    double w_N0 = 0.5;
    double w_min = 0.05;
    double w_max = 0.95;
    double alpha_floor = 1e-6;
    double denom_eps = 1e-6;
    double var_floor = kVarFloor;

    LeveragePolicy leverage_policy(double alpha_now) const { return {alpha_now, b, sigma0, var_floor}; }
    PolicyRuleParams policy_rule() const { return {alpha, rho_alpha, delta_alpha, theta}; }
    RedistributionParams redistribution() const { return {xi, E0}; }
};

void validate(const VarEquityParams& params);

struct VarEquityState {
    double p = 0.0;
    double p_prev = 0.0;
    double sigma2 = 0.0;
    double L = 0.0;
    double n = 0.0;
    double w_N = 0.5;
    double alpha = 0.1;
    double q = 0.0;
};

struct VarDerived {
    double leverage = 0.0;
    double assets = 0.0;
    double equity = 0.0;
    double delta_b = 0.0;
    double cash_bank = 0.0;
    double cash_noise = 0.0;
};

VarEquityState initial_var_state(const VarEquityParams& params);

VarDerived derived_quantities(const VarEquityState& s, double w_B, const LeveragePolicy& policy);
double noise_weight_update(double w_N, double rho, double eta, Rng& rng, double w_min = 0.05,
                           double w_max = 0.95);
std::pair<double, double> redistribute_equity(double c_B, double c_N, double equity,
                                              const RedistributionParams& params);
std::pair<double, double> policy_alpha_update(double alpha, double q, double p, double p_prev,
                                              const PolicyRuleParams& params, double alpha_floor = 1e-6);
double effective_max_leverage(double alpha, double sigma0, double b);
// sigma0 giving effective maximum leverage lambda_m
double sigma0_for_max_leverage(double lambda_m, double alpha, double b);

struct VarStepResult {
    VarEquityState state;
    RunStatus status = RunStatus::ok;
    VarDerived derived;
};

VarStepResult step_var_equity(const VarEquityState& s, const VarEquityParams& params, NoiseMode mode, Rng& rng);

struct VarEquitySeries {
    std::vector<double> p;
    std::vector<double> leverage;
    std::vector<double> assets;
    std::vector<double> liabilities;
    std::vector<double> n;
    std::vector<double> w_N;
    std::vector<double> alpha;
    std::vector<double> q;
    std::vector<double> equity_bank;
    std::vector<double> delta_b;
    RunStatus status = RunStatus::ok;
    std::size_t steps_completed = 0;

    std::size_t rows() const { return p.size(); }
};

VarEquitySeries run_var_equity(const VarEquityParams& params, NoiseMode mode, std::size_t T, std::uint64_t seed);

}  // namespace levcycle
