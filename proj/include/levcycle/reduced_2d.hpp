#pragma once

#include "levcycle/core_model.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace levcycle {

struct State2D {
    double z1 = 0.0;
    double z2 = 0.0;
};

struct Map2DParams {
    double delta = 0.1;
    double alpha = 1.0;
    double equity = 1.0;
    double var_floor = kVarFloor;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

struct EigenPairs2D {
    std::complex<double> lambda_minus;
    std::complex<double> lambda_plus;
    std::array<std::complex<double>, 2> e_minus;
    std::array<std::complex<double>, 2> e_plus;
};

State2D step_2d(State2D z, double delta, double var_floor = kVarFloor);
double price_2d(State2D z, const Map2DParams& params);
Mat2 jacobian_2d(State2D z, double delta, double var_floor = kVarFloor);
EigenPairs2D eigen_closed_form(State2D z, double delta, double var_floor = kVarFloor);

struct Trajectory2D {
    std::vector<State2D> states;
    std::vector<double> prices;
};

Trajectory2D run_2d(State2D z0, const Map2DParams& params, std::size_t T, double jitter = 1e-12,
                    std::uint64_t seed = 0);

struct PhaseSlope {
    double slope = 0.0;
    std::size_t points = 0;
    std::size_t segments = 0;
};

// Through-origin least-squares slope of z2 against z1 over the points of
// monotone descents of z1 lasting at least min_run steps (the peak excluded).
PhaseSlope descent_line_slope(const Trajectory2D& traj, std::size_t min_run = 10);

}  // namespace levcycle
