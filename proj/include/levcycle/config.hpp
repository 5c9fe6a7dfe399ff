#pragma once

#include "levcycle/core_model.hpp"
#include "levcycle/reduced_2d.hpp"
#include "levcycle/sweep.hpp"
#include "levcycle/var_equity.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace levcycle {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Run2DConfig {
    Map2DParams map;
    State2D z0{0.01, 0.02};
    double jitter = 1e-12;
};

nlohmann::ordered_json to_json(const SimConfig& cfg);
nlohmann::ordered_json to_json(const VarEquityParams& params);
nlohmann::ordered_json to_json(const Run2DConfig& cfg);
nlohmann::ordered_json to_json(const SweepSpec& spec);

// Each reader overlays the fields present in `j` onto `out`; `path` prefixes error messages.
void read_json(const nlohmann::json& j, SimConfig& out, const std::string& path = "full");
void read_json(const nlohmann::json& j, VarEquityParams& out, const std::string& path = "var_equity");
void read_json(const nlohmann::json& j, Run2DConfig& out, const std::string& path = "reduced_2d");
void read_json(const nlohmann::json& j, SweepSpec& out, const std::string& path = "sweep");

nlohmann::json load_json_file(const std::string& path);

}  // namespace levcycle
