#include "levcycle/var_equity.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace levcycle;

namespace {

VarEquityState state(double p, double n, double w_N, double L) {
    VarEquityState s;
    s.p = p;
    s.p_prev = p;
    s.n = n;
    s.w_N = w_N;
    s.L = L;
    s.sigma2 = 0.01;
    s.alpha = 0.1;
    return s;
}

}  // namespace

TEST_CASE("derived_quantities") {
    const VarDerived d = derived_quantities(state(100, 0.1, 0.5, 150), 0.05, {0.1, -0.5, 0.0});
    CHECK(d.assets == doctest::Approx(200.0));
    CHECK(d.cash_bank == doctest::Approx(190.0));
    CHECK(d.cash_noise == doctest::Approx(90.0));
    CHECK(d.equity == doctest::Approx(50.0));
    CHECK(d.leverage == doctest::Approx(1.0));
    CHECK(d.delta_b == doctest::Approx(50.0 - 200.0));
    const VarDerived t = derived_quantities(state(100, 0.1, 0.5, 150), 0.05, {4.0, 0.0, 0.0});
    CHECK(t.delta_b == doctest::Approx(0.0));
    CHECK_THROWS_AS(derived_quantities(state(100, 0.1, 0.5, 200), 0.05, {0.1, -0.5, 0.0}), BankruptcyError);
}

TEST_CASE("price update examples") {
    VarEquityParams p;
    p.w_B = 0.05;
    p.xi = 0.0;
    p.b = 0.0;
    p.delta = 0.1;
    VarEquityState s = state(100, 0.1, 0.5, 0.0);
    Rng rng(1);

    // leverage target alpha with b = 0; choose alpha so that lambda E = A
    s.L = 150.0;
    s.alpha = 4.0;
    p.alpha = 4.0;
    VarStepResult r = step_var_equity(s, p, NoiseMode::deterministic, rng);
    CHECK(r.derived.delta_b == doctest::Approx(0.0));
    CHECK(r.state.p == doctest::Approx(100.0).epsilon(1e-14));

    s.alpha = p.alpha = 210.0 / 50.0;
    r = step_var_equity(s, p, NoiseMode::deterministic, rng);
    CHECK(r.derived.delta_b == doctest::Approx(10.0));
    CHECK(std::abs(r.state.p - 100.91743119266054) < 1e-12);
    CHECK(r.state.L == doctest::Approx(160.0));

    double prev = 0.0;
    for (double a : {4.0, 4.1, 4.2, 4.5}) {
        s.alpha = p.alpha = a;
        const double pn = step_var_equity(s, p, NoiseMode::deterministic, rng).state.p;
        CHECK(pn > prev);
        prev = pn;
    }
}

TEST_CASE("noise_weight_update") {
    Rng rng(2);
    CHECK(noise_weight_update(0.5, 0.9, 0.0, rng) == 0.5);
    CHECK(noise_weight_update(0.4, 0.9, 0.0, rng) == doctest::Approx(0.436).epsilon(1e-15));
    CHECK(noise_weight_update(0.9, 0.0, 10.0, rng) >= 0.05);

    Rng a(8), b(8);
    double w = 0.5, r = 0.5;
    for (int t = 0; t < 500; ++t) {
        w = noise_weight_update(w, 0.9, 0.01, a);
        r = std::clamp(r * (1.0 + (0.5 - r) * 0.9 + 0.01 * b.normal()), 0.05, 0.95);
    }
    CHECK(w == r);
}

TEST_CASE("redistribute_equity") {
    const RedistributionParams rp{1.2, 10.0};
    auto [b0, n0] = redistribute_equity(5.0, 7.0, 10.0, rp);
    CHECK(b0 == 5.0);
    CHECK(n0 == 7.0);
    auto [b1, n1] = redistribute_equity(5.0, 7.0, 8.0, rp);
    CHECK(b1 - 5.0 == doctest::Approx(2.4));
    CHECK(b1 + n1 == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("policy_alpha_update") {
    PolicyRuleParams pr{0.1, 0.5, 0.3, 0.0};
    double alpha = 0.4, q = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double gap = alpha - 0.1;
        std::tie(alpha, q) = policy_alpha_update(alpha, q, 10.0, 10.0, pr);
        CHECK(alpha - 0.1 == doctest::Approx(0.5 * gap).epsilon(1e-12));
    }
    CHECK(q == 0.0);

    PolicyRuleParams one{0.1, 0.5, 1.0, 2.0};
    auto [a1, q1] = policy_alpha_update(0.1, 0.3, 12.0, 10.0, one);
    CHECK(q1 == doctest::Approx(std::log(1.2)));
    CHECK(a1 == doctest::Approx(0.1 + 2.0 * 0.3));
    auto [a2, q2] = policy_alpha_update(0.1, -5.0, 10.0, 10.0, one);
    CHECK(a2 == 1e-6);
    (void)q2;
}

TEST_CASE("effective_max_leverage") {
    CHECK(effective_max_leverage(0.2, 0.01, -0.5) == doctest::Approx(2.0));
    CHECK(effective_max_leverage(0.2, 0.0001, -0.5) == doctest::Approx(20.0));
    CHECK_THROWS_AS(effective_max_leverage(0.2, 0.0, -0.5), std::domain_error);
    CHECK(sigma0_for_max_leverage(20.0, 0.2, -0.5) == doctest::Approx(1e-4));
}

TEST_CASE("run_var_equity invariants") {
    for (NoiseMode mode : {NoiseMode::deterministic, NoiseMode::stochastic}) {
        VarEquityParams p;
        const VarEquitySeries r = run_var_equity(p, mode, 3000, 5);
        CHECK(r.status == RunStatus::ok);
        REQUIRE(r.rows() == 3001);
        for (std::size_t t = 0; t + 1 < r.rows(); ++t) {
            CHECK(r.liabilities[t + 1] == r.liabilities[t] + r.delta_b[t]);
            CHECK(r.n[t] >= 0.0);
            CHECK(r.n[t] <= 1.0);
            CHECK(r.w_N[t] >= 0.05);
            CHECK(r.w_N[t] <= 0.95);
        }
    }
}

TEST_CASE("leverage never exceeds the effective maximum") {
    VarEquityParams p;
    p.alpha = 0.2;
    for (double lm : {2.0, 5.0, 10.0, 40.0}) {
        p.sigma0 = sigma0_for_max_leverage(lm, p.alpha, p.b);
        const double cap = effective_max_leverage(p.alpha, p.sigma0, p.b);
        const VarEquitySeries r = run_var_equity(p, NoiseMode::stochastic, 2000, 3);
        for (double l : r.leverage) CHECK(l <= cap);
    }
}

TEST_CASE("theta zero matches the fixed-alpha run") {
    VarEquityParams fixed;
    VarEquityParams pol = fixed;
    pol.policy = true;
    pol.theta = 0.0;
    const VarEquitySeries a = run_var_equity(fixed, NoiseMode::stochastic, 2000, 9);
    const VarEquitySeries b = run_var_equity(pol, NoiseMode::stochastic, 2000, 9);
    CHECK(a.p == b.p);
    CHECK(a.alpha == b.alpha);
}

TEST_CASE("initial state follows the balance-sheet scalars") {
    const VarEquityState s = initial_var_state(VarEquityParams{});
    CHECK(s.p == doctest::Approx(25.0));
    CHECK(s.L == doctest::Approx(40.0));
    CHECK(s.n * s.p / 0.05 - s.L == doctest::Approx(10.0));
}
