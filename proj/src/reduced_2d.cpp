#include "levcycle/reduced_2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levcycle {

State2D step_2d(State2D z, double delta, double var_floor) {
    if (z.z1 <= 0.0 && z.z2 <= 0.0) return {0.0, 0.0};
    const double z1 = std::max(z.z1, var_floor);
    const double z2 = std::max(z.z2, var_floor);
    const double l = std::log(z2 / z1);
    return {(1.0 - delta) * z.z1 + 0.25 * delta * l * l, z.z1};
}

double price_2d(State2D z, const Map2DParams& params) {
    return params.alpha * params.equity / std::sqrt(std::max(z.z1, params.var_floor));
}

Mat2 jacobian_2d(State2D z, double delta, double var_floor) {
    const double z1 = std::max(z.z1, var_floor);
    const double z2 = std::max(z.z2, var_floor);
    const double l = std::log(z2 / z1);
    Mat2 j{};
    j[0][0] = 1.0 - delta - delta * l / (2.0 * z1);
    j[0][1] = delta * l / (2.0 * z2);
    j[1][0] = 1.0;
    j[1][1] = 0.0;
    return j;
}

EigenPairs2D eigen_closed_form(State2D z, double delta, double var_floor) {
    using C = std::complex<double>;
    const double z1 = std::max(z.z1, var_floor);
    const double z2 = std::max(z.z2, var_floor);
    const double l = std::log(z2 / z1);
    const double q1 = -2.0 * delta * z1 * z2 - delta * z2 * l + 2.0 * z1 * z2;
    const double inner = 2.0 * delta * z1 * z2 + delta * z2 * l - 2.0 * z1 * z2;
    const double disc = 8.0 * delta * z1 * z1 * z2 * l + inner * inner;
    const double q3 = 4.0 * z1 * z2;
    const C q2 = std::sqrt(C(disc, 0.0));

    EigenPairs2D out;
    if (disc >= 0.0) {
        // q1^2 - q2^2 = -8 delta z1^2 z2 l gives the cancelling root
        const double prod = -8.0 * delta * z1 * z1 * z2 * l;
        if (q1 >= 0.0) {
            const double big = q1 + q2.real();
            out.lambda_minus = C(big / q3, 0.0);
            out.lambda_plus = C(big != 0.0 ? prod / (q3 * big) : 0.0, 0.0);
        } else {
            const double big = q1 - q2.real();
            out.lambda_plus = C(big / q3, 0.0);
            out.lambda_minus = C(prod / (q3 * big), 0.0);
        }
    } else {
        out.lambda_plus = (C(q1, 0.0) - q2) / q3;
        out.lambda_minus = (C(q1, 0.0) + q2) / q3;
    }
    out.e_minus = {out.lambda_minus, C(1.0, 0.0)};
    out.e_plus = {out.lambda_plus, C(1.0, 0.0)};
    return out;
}

Trajectory2D run_2d(State2D z0, const Map2DParams& params, std::size_t T, double jitter, std::uint64_t seed) {
    if (!(z0.z1 > 0.0 && z0.z2 > 0.0)) throw std::invalid_argument("run_2d: initial state must be positive");
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw std::invalid_argument("run_2d: delta must lie in (0,1)");
    Rng rng(seed);
    Trajectory2D out;
    out.states.reserve(T + 1);
    out.prices.reserve(T + 1);
    State2D z = z0;
    out.states.push_back(z);
    out.prices.push_back(price_2d(z, params));
    for (std::size_t t = 0; t < T; ++t) {
        z = step_2d(z, params.delta, params.var_floor);
        if (jitter != 0.0) z.z1 *= 1.0 + jitter * rng.normal();
        out.states.push_back(z);
        out.prices.push_back(price_2d(z, params));
    }
    return out;
}

PhaseSlope descent_line_slope(const Trajectory2D& traj, std::size_t min_run) {
    PhaseSlope out;
    double sxy = 0.0, sxx = 0.0;
    const auto& st = traj.states;
    std::size_t i = 0;
    while (i + 1 < st.size()) {
        std::size_t j = i;
        while (j + 1 < st.size() && st[j + 1].z1 < st[j].z1) ++j;
        if (j - i >= min_run) {
            for (std::size_t k = i + 1; k <= j; ++k) {
                sxy += st[k].z1 * st[k].z2;
                sxx += st[k].z1 * st[k].z1;
            }
            out.points += j - i;
            ++out.segments;
        }
        i = j + 1;
    }
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return out;
}

}  // namespace levcycle
