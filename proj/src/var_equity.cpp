#include "levcycle/var_equity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levcycle {

const char* mode_name(NoiseMode m) { return m == NoiseMode::deterministic ? "deterministic" : "stochastic"; }

void validate(const VarEquityParams& p) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    require(p.alpha > 0.0, "alpha must be positive");
    require(p.delta > 0.0 && p.delta <= 1.0, "delta must lie in (0,1]");
    require(p.sigma0 >= 0.0, "sigma0 must be nonnegative");
    require(p.E0 > 0.0 && p.lambda0 > 1.0, "E0 must be positive and lambda0 above 1");
    require(p.w_B > 0.0 && p.w_B < 1.0, "w_B must lie in (0,1)");
    require(p.n0 > 0.0 && p.n0 < 1.0, "n0 must lie in (0,1)");
    require(p.xi >= 0.0, "xi must be nonnegative");
    require(p.w_min > 0.0 && p.w_min < p.w_max && p.w_max < 1.0, "w_N clamp must lie inside (0,1)");
    require(p.w_N0 >= p.w_min && p.w_N0 <= p.w_max, "w_N0 must lie inside the clamp");
    require(p.rho_alpha >= 0.0 && p.rho_alpha <= 1.0, "rho_alpha must lie in [0,1]");
    require(p.delta_alpha >= 0.0 && p.delta_alpha <= 1.0, "delta_alpha must lie in [0,1]");
    require(p.theta >= 0.0, "theta must be nonnegative");
    require(p.sigma2_0 >= 0.0, "sigma2_0 must be nonnegative");
}

VarEquityState initial_var_state(const VarEquityParams& params) {
    validate(params);
    VarEquityState s;
    s.p = params.lambda0 * params.E0 * params.w_B / params.n0;
    s.p_prev = s.p;
    s.sigma2 = params.sigma2_0;
    s.L = params.lambda0 * params.E0 - params.E0;
    s.n = params.n0;
    s.w_N = params.w_N0;
    s.alpha = params.alpha;
    s.q = 0.0;
    return s;
}

VarDerived derived_quantities(const VarEquityState& s, double w_B, const LeveragePolicy& policy) {
    VarDerived d;
    d.assets = s.n * s.p / w_B;
    d.equity = d.assets - s.L;
    if (!(d.equity > 0.0)) throw BankruptcyError("derived_quantities: bank equity is not positive");
    d.leverage = target_leverage(s.sigma2, policy);
    d.delta_b = d.leverage * d.equity - d.assets;
    d.cash_bank = (1.0 - w_B) * s.n * s.p / w_B;
    d.cash_noise = (1.0 - s.w_N) * (1.0 - s.n) * s.p / s.w_N;
    return d;
}

double noise_weight_update(double w_N, double rho, double eta, Rng& rng, double w_min, double w_max) {
    const double eps = eta != 0.0 ? rng.normal() : 0.0;
    const double next = w_N * (1.0 + (0.5 - w_N) * rho + eta * eps);
    return std::clamp(next, w_min, w_max);
}

std::pair<double, double> redistribute_equity(double c_B, double c_N, double equity,
                                              const RedistributionParams& params) {
    const double dE = params.xi * (params.E0 - equity);
    return {c_B + dE, c_N - dE};
}

std::pair<double, double> policy_alpha_update(double alpha, double q, double p, double p_prev,
                                              const PolicyRuleParams& params, double alpha_floor) {
    if (!(p > 0.0 && p_prev > 0.0)) throw std::invalid_argument("policy_alpha_update: prices must be positive");
    const double next_alpha = alpha + params.rho_alpha * (params.alpha0 - alpha) + params.theta * q;
    const double next_q = (1.0 - params.delta_alpha) * q + params.delta_alpha * std::log(p / p_prev);
    return {std::max(next_alpha, alpha_floor), next_q};
}

double effective_max_leverage(double alpha, double sigma0, double b) {
    if (!(sigma0 > 0.0) && b < 0.0)
        throw std::domain_error("effective_max_leverage: undefined for sigma0 = 0 with b < 0");
    return alpha * std::pow(sigma0, b);
}

double sigma0_for_max_leverage(double lambda_m, double alpha, double b) {
    if (!(lambda_m > 0.0 && alpha > 0.0) || b == 0.0)
        throw std::invalid_argument("sigma0_for_max_leverage: need lambda_m, alpha > 0 and b != 0");
    return std::pow(lambda_m / alpha, 1.0 / b);
}

namespace {

bool exceeds(double x) { return !std::isfinite(x) || std::abs(x) > kInstabilityThreshold; }

}  // namespace

VarStepResult step_var_equity(const VarEquityState& s, const VarEquityParams& params, NoiseMode mode, Rng& rng) {
    VarStepResult r;
    r.state = s;
    try {
        r.derived = derived_quantities(s, params.w_B, params.leverage_policy(s.alpha));
    } catch (const BankruptcyError&) {
        r.status = RunStatus::bankrupt;
        return r;
    }
    const VarDerived& d = r.derived;
    if (exceeds(d.leverage) || exceeds(d.delta_b)) {
        r.status = RunStatus::unstable;
        return r;
    }
    VarEquityState& n = r.state;
    if (mode == NoiseMode::stochastic)
        n.w_N = noise_weight_update(s.w_N, params.rho, params.eta, rng, params.w_min, params.w_max);

    auto [c_B, c_N] = redistribute_equity(d.cash_bank, d.cash_noise, d.equity, params.redistribution());

    const double x = std::log(s.p / s.p_prev);
    n.sigma2 = (1.0 - params.delta) * s.sigma2 + params.delta * x * x;
    n.L = s.L + d.delta_b;

    const double w_B = params.w_B;
    const double denom = 1.0 - w_B * s.n - (1.0 - s.n) * n.w_N;
    if (!(denom > params.denom_eps)) {
        r.status = RunStatus::degenerate;
        return r;
    }
    const double p_next = (w_B * (c_B + d.delta_b) + n.w_N * c_N) / denom;
    if (!(p_next > 0.0) || exceeds(p_next)) {
        r.status = RunStatus::unstable;
        return r;
    }
    n.n = w_B * (s.n * p_next + c_B + d.delta_b) / p_next;
    n.p_prev = s.p;
    n.p = p_next;
    auto [a, q] = policy_alpha_update(s.alpha, s.q, s.p, s.p_prev, params.policy_rule(), params.alpha_floor);
    n.q = q;
    if (params.policy) n.alpha = a;
    return r;
}

namespace {

void record(VarEquitySeries& out, const VarEquityState& s, const VarEquityParams& params, double delta_b) {
    const double assets = s.n * s.p / params.w_B;
    out.p.push_back(s.p);
    out.leverage.push_back(target_leverage(s.sigma2, params.leverage_policy(s.alpha)));
    out.assets.push_back(assets);
    out.liabilities.push_back(s.L);
    out.n.push_back(s.n);
    out.w_N.push_back(s.w_N);
    out.alpha.push_back(s.alpha);
    out.q.push_back(s.q);
    out.equity_bank.push_back(assets - s.L);
    out.delta_b.push_back(delta_b);
}

}  // namespace

VarEquitySeries run_var_equity(const VarEquityParams& params, NoiseMode mode, std::size_t T, std::uint64_t seed) {
    Rng rng(seed);
    VarEquityState s = initial_var_state(params);
    VarEquitySeries out;
    const std::size_t reserve = std::min<std::size_t>(T + 1, 1u << 20);
    out.p.reserve(reserve);
    record(out, s, params, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        VarStepResult r = step_var_equity(s, params, mode, rng);
        if (r.status != RunStatus::ok) {
            out.status = r.status;
            break;
        }
        s = r.state;
        out.delta_b.back() = r.derived.delta_b;
        record(out, s, params, 0.0);
        out.steps_completed = t + 1;
    }
    if (out.status == RunStatus::ok && !(out.equity_bank.back() > 0.0)) out.status = RunStatus::bankrupt;
    return out;
}

}  // namespace levcycle
