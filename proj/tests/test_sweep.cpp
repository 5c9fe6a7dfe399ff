#include "levcycle/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace levcycle;

TEST_CASE("coefficient of variation") {
    const std::vector<double> flat(50, 3.0);
    CHECK(coefficient_of_variation(flat, 0.2) == 0.0);

    std::vector<double> halves(100, 1.0);
    std::fill(halves.begin() + 50, halves.end(), 3.0);
    // burn-in removes the first 20; remaining 30 ones and 50 threes
    const double m = (30.0 + 150.0) / 80.0;
    const double var = (30.0 * (1 - m) * (1 - m) + 50.0 * (3 - m) * (3 - m)) / 80.0;
    CHECK(coefficient_of_variation(halves, 0.2) == doctest::Approx(std::sqrt(var) / m).epsilon(1e-14));
    CHECK(coefficient_of_variation(halves, 0.5) == 0.0);
    CHECK(coefficient_of_variation(halves, 0.0) == doctest::Approx(0.5));

    CHECK(burn_in_count(5000, 0.2) == 1000);
    CHECK(burn_in_count(7, 0.3) == 2);
    CHECK_THROWS_AS(coefficient_of_variation(flat, 1.0), MetricError);
    CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{1.0}, 0.0), MetricError);
}

TEST_CASE("run classification") {
    std::vector<double> p(100, 1.0);
    CHECK(classify_run(RunStatus::ok, p, 0.2).cls == Classification::stable);
    CHECK(classify_run(RunStatus::unstable, p, 0.2).cv == kUnstableCv);
    CHECK(classify_run(RunStatus::degenerate, p, 0.2).cls == Classification::unstable);
    CHECK(classify_run(RunStatus::bankrupt, p, 0.2).cv == kBankruptCv);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i % 2 ? 1.0 : 2.0;
    CHECK(classify_run(RunStatus::ok, p, 0.2).cls == Classification::cyclic);
    CHECK(kStableThreshold == doctest::Approx(std::pow(10.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("cycle detection") {
    std::vector<double> mono(200);
    std::iota(mono.begin(), mono.end(), 1.0);
    CHECK(cycle_detect(mono).count == 0);

    std::vector<double> square;
    for (int k = 0; k < 6; ++k) {
        square.insert(square.end(), 10, 1.0);
        square.insert(square.end(), 10, 2.0);
    }
    const CycleStats s = cycle_detect(square);
    CHECK(s.count == 5);
    CHECK(s.mean_amplitude == doctest::Approx(1.0));
    CHECK(s.mean_period == doctest::Approx(20.0));

    std::vector<double> wiggle(400);
    for (std::size_t i = 0; i < wiggle.size(); ++i) wiggle[i] = 1.0 + 0.05 * std::sin(0.1 * static_cast<double>(i));
    CHECK(cycle_detect(wiggle).count == 0);
    CHECK(cycle_detect(wiggle, 0.01).count > 0);
}

TEST_CASE("asset-leverage correlation") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> a(100), l(100), inv(100);
    double x = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        x += 0.1 * nd(gen);
        a[t] = std::exp(x);
        l[t] = std::exp(2.0 * x);
        inv[t] = std::exp(-0.5 * x);
    }
    CHECK(asset_leverage_correlation(a, l) == doctest::Approx(1.0));
    CHECK(asset_leverage_correlation(a, inv) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(asset_leverage_correlation(std::span(a).first(5), std::span(l).first(5)), MetricError);
}

TEST_CASE("axis values") {
    Axis a{"alpha", 0.0, 0.7, 70, false};
    const auto v = a.values();
    CHECK(v.front() == doctest::Approx(0.01));
    CHECK(v.back() == doctest::Approx(0.7));
    Axis b{"b", -0.5, 0.5, 5, true};
    const auto w = b.values();
    CHECK(w == std::vector<double>{-0.5, -0.25, 0.0, 0.25, 0.5});
}

namespace {

SweepSpec small_spec() {
    SweepSpec s;
    s.name = "small";
    s.model = SweepModel::var_stochastic;
    s.x = Axis{"alpha", 0.05, 0.4, 3, true};
    s.y = Axis{"delta", 0.1, 0.3, 2, true};
    s.seeds = 3;
    s.T = 600;
    s.master_seed = 77;
    return s;
}

bool same(const SweepResult& a, const SweepResult& b) {
    if (a.cells.size() != b.cells.size()) return false;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const CellResult& x = a.cells[i];
        const CellResult& y = b.cells[i];
        if (x.run_cv != y.run_cv || x.mean_log10_cv != y.mean_log10_cv || x.n_stable != y.n_stable ||
            x.n_cyclic != y.n_cyclic || x.x != y.x || x.y != y.y)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("single cell equals a direct run") {
    SweepSpec s = small_spec();
    s.x = Axis{"alpha", 0.2, 0.2, 1, true};
    s.y.reset();
    s.seeds = 1;
    s.fixed["b"] = -0.4;
    const SweepResult r = sweep(s);
    VarEquityParams p;
    p.alpha = 0.2;
    p.b = -0.4;
    const VarEquitySeries run = run_var_equity(p, NoiseMode::stochastic, s.T, run_seed(s.master_seed, 0, 0, 0));
    CHECK(r.cells.at(0).run_cv.at(0) == classify_run(run, s.burn_in).cv);
}

TEST_CASE("sweep is independent of schedule and job count") {
    const SweepSpec s = small_spec();
    const SweepResult base = sweep(s, 1);
    std::vector<std::size_t> order(base.cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::swap(order[1], order[3]);
    CHECK(same(base, sweep(s, 1, order)));
    CHECK(same(base, sweep(s, 4)));
    CHECK(same(base, sweep(s, 3, order)));
}

TEST_CASE("cell aggregates") {
    const SweepResult r = sweep(small_spec(), 2);
    for (const CellResult& c : r.cells) {
        const double m = std::accumulate(c.run_cv.begin(), c.run_cv.end(), 0.0) / static_cast<double>(c.run_cv.size());
        CHECK(c.mean_cv == doctest::Approx(m).epsilon(1e-15));
        CHECK(c.mean_log10_cv == doctest::Approx(std::log10(m)).epsilon(1e-15));
        CHECK(c.n_stable + c.n_cyclic + c.n_bankrupt + c.n_unstable == 3);
    }
    CHECK(r.at(2, 1).x == doctest::Approx(0.4));
    CHECK(r.at(2, 1).y == doctest::Approx(0.3));
}

TEST_CASE("invalid sweep specs") {
    SweepSpec s = small_spec();
    s.x.name = "gamma";
    CHECK_THROWS_AS(sweep(s), std::invalid_argument);
    s = small_spec();
    s.x.count = 0;
    CHECK_THROWS_AS(sweep(s), std::invalid_argument);
    s = small_spec();
    s.y->lo = 1.0;
    s.y->hi = 0.5;
    CHECK_THROWS_AS(sweep(s), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("var"), std::invalid_argument);
    CHECK(parse_model("var-deterministic") == SweepModel::var_deterministic);
}

TEST_CASE("builtin specs validate") {
    for (const SweepSpec& s : builtin_specs()) CHECK_NOTHROW(validate(s));
    CHECK(find_builtin_spec("paper-alpha-delta").has_value());
    CHECK_FALSE(find_builtin_spec("nope").has_value());
}

TEST_CASE("CV is scale invariant") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> x(300), y(300);
        const double c = std::exp(std::uniform_real_distribution<double>(-20.0, 20.0)(gen));
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(gen);
            y[i] = c * x[i];
        }
        CHECK(std::abs(coefficient_of_variation(x, 0.2) - coefficient_of_variation(y, 0.2)) < 1e-12);
    }
}
