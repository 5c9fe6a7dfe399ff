#pragma once

#include "levcycle/core_model.hpp"
#include "levcycle/reduced_2d.hpp"
#include "levcycle/sweep.hpp"
#include "levcycle/var_equity.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace levcycle {

// Shortest round-trip text with 17 significant digits.
std::string format_double(double x);

void write_full_csv(std::ostream& os, const FullSeries& run);
void write_var_csv(std::ostream& os, const VarEquitySeries& run);
void write_2d_csv(std::ostream& os, const Trajectory2D& traj, double delta);
void write_sweep_csv(std::ostream& os, const SweepResult& res);

nlohmann::ordered_json full_to_json(const FullSeries& run);
nlohmann::ordered_json var_to_json(const VarEquitySeries& run);
nlohmann::ordered_json traj_to_json(const Trajectory2D& traj, double delta);
nlohmann::ordered_json sweep_sidecar(const SweepResult& res);

}  // namespace levcycle
