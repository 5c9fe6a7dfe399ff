#include "levcycle/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace levcycle {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
}

std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

using Setter = std::function<void(const json&, const std::string&)>;

void apply(const json& j, const std::string& path, const std::map<std::string, Setter>& fields) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto f = fields.find(it.key());
        const std::string sub = path + "." + it.key();
        if (f == fields.end()) throw ConfigError(sub + ": unknown field");
        f->second(it.value(), sub);
    }
}

Setter num(double& d) {
    return [&d](const json& v, const std::string& p) { d = as_number(v, p); };
}

Setter flag(bool& b) {
    return [&b](const json& v, const std::string& p) { b = as_bool(v, p); };
}

}  // namespace

ordered_json to_json(const SimConfig& c) {
    ordered_json j;
    j["delta"] = c.delta;
    j["alpha"] = c.alpha;
    j["b"] = c.b;
    j["sigma0"] = c.sigma0;
    j["E0"] = c.E0;
    j["lambda0"] = c.lambda0;
    j["w_c"] = c.w_c;
    j["gamma"] = c.gamma;
    j["beta"] = c.beta;
    j["N_b"] = c.N_b;
    j["A_N0"] = c.A_N0;
    j["rho"] = c.rho;
    j["zeta"] = c.zeta;
    j["eta"] = c.eta;
    j["mu"] = c.mu;
    j["phi"] = c.phi;
    j["N_S"] = c.N_S;
    j["pi0"] = c.pi0;
    j["active"] = c.active;
    j["allocator"] = c.allocator == Allocator::softmax ? "softmax" : "optimizer";
    j["var_scale"] = c.var_scale;
    j["T"] = c.T;
    j["seed"] = c.seed;
    return j;
}

void read_json(const json& j, SimConfig& c, const std::string& path) {
    apply(j, path,
          {{"delta", num(c.delta)},
           {"alpha", num(c.alpha)},
           {"b", num(c.b)},
           {"sigma0", num(c.sigma0)},
           {"E0", num(c.E0)},
           {"lambda0", num(c.lambda0)},
           {"w_c", num(c.w_c)},
           {"gamma", num(c.gamma)},
           {"beta", num(c.beta)},
           {"N_b", [&](const json& v, const std::string& p) { c.N_b = static_cast<int>(as_count(v, p)); }},
           {"A_N0", num(c.A_N0)},
           {"rho", num(c.rho)},
           {"zeta", num(c.zeta)},
           {"eta", num(c.eta)},
           {"mu", num(c.mu)},
           {"phi", num(c.phi)},
           {"N_S", [&](const json& v, const std::string& p) { c.N_S = static_cast<int>(as_count(v, p)); }},
           {"pi0", num(c.pi0)},
           {"active", flag(c.active)},
           {"allocator",
            [&](const json& v, const std::string& p) {
                const std::string s = as_string(v, p);
                if (s == "softmax") c.allocator = Allocator::softmax;
                else if (s == "optimizer") c.allocator = Allocator::optimizer;
                else throw ConfigError(p + ": expected softmax or optimizer");
            }},
           {"var_scale", num(c.var_scale)},
           {"T", [&](const json& v, const std::string& p) { c.T = as_count(v, p); }},
           {"seed", [&](const json& v, const std::string& p) { c.seed = as_count(v, p); }}});
    try {
        validate(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ordered_json to_json(const VarEquityParams& p) {
    ordered_json j;
    j["alpha"] = p.alpha;
    j["delta"] = p.delta;
    j["b"] = p.b;
    j["sigma0"] = p.sigma0;
    j["E0"] = p.E0;
    j["lambda0"] = p.lambda0;
    j["w_B"] = p.w_B;
    j["n0"] = p.n0;
    j["xi"] = p.xi;
    j["rho"] = p.rho;
    j["eta"] = p.eta;
    j["policy"] = p.policy;
    j["rho_alpha"] = p.rho_alpha;
    j["delta_alpha"] = p.delta_alpha;
    j["theta"] = p.theta;
    j["sigma2_0"] = p.sigma2_0;
    j["w_N0"] = p.w_N0;
    j["w_min"] = p.w_min;
    j["w_max"] = p.w_max;
    j["alpha_floor"] = p.alpha_floor;
    j["denom_eps"] = p.denom_eps;
    j["var_floor"] = p.var_floor;
    return j;
}

void read_json(const json& j, VarEquityParams& p, const std::string& path) {
    apply(j, path,
          {{"alpha", num(p.alpha)},
           {"alpha0", num(p.alpha)},
           {"delta", num(p.delta)},
           {"b", num(p.b)},
           {"sigma0", num(p.sigma0)},
           {"E0", num(p.E0)},
           {"lambda0", num(p.lambda0)},
           {"w_B", num(p.w_B)},
           {"n0", num(p.n0)},
           {"xi", num(p.xi)},
           {"rho", num(p.rho)},
           {"eta", num(p.eta)},
           {"policy", flag(p.policy)},
           {"rho_alpha", num(p.rho_alpha)},
           {"delta_alpha", num(p.delta_alpha)},
           {"theta", num(p.theta)},
           {"sigma2_0", num(p.sigma2_0)},
           {"w_N0", num(p.w_N0)},
           {"w_min", num(p.w_min)},
           {"w_max", num(p.w_max)},
           {"alpha_floor", num(p.alpha_floor)},
           {"denom_eps", num(p.denom_eps)},
           {"var_floor", num(p.var_floor)}});
    try {
        validate(p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ordered_json to_json(const Run2DConfig& c) {
    ordered_json j;
    j["delta"] = c.map.delta;
    j["alpha"] = c.map.alpha;
    j["E"] = c.map.equity;
    j["var_floor"] = c.map.var_floor;
    j["z1"] = c.z0.z1;
    j["z2"] = c.z0.z2;
    j["jitter"] = c.jitter;
    return j;
}

void read_json(const json& j, Run2DConfig& c, const std::string& path) {
    apply(j, path,
          {{"delta", num(c.map.delta)},
           {"alpha", num(c.map.alpha)},
           {"E", num(c.map.equity)},
           {"var_floor", num(c.map.var_floor)},
           {"z1", num(c.z0.z1)},
           {"z2", num(c.z0.z2)},
           {"jitter", num(c.jitter)}});
    if (!(c.map.delta > 0.0 && c.map.delta < 1.0)) throw ConfigError(path + ".delta: must lie in (0,1)");
    if (!(c.z0.z1 > 0.0 && c.z0.z2 > 0.0)) throw ConfigError(path + ": z1 and z2 must be positive");
}

namespace {

ordered_json axis_json(const Axis& a) {
    ordered_json j;
    j["name"] = a.name;
    j["lo"] = a.lo;
    j["hi"] = a.hi;
    j["count"] = a.count;
    j["include_lo"] = a.include_lo;
    return j;
}

Axis read_axis(const json& j, const std::string& path) {
    Axis a;
    bool named = false;
    apply(j, path,
          {{"name",
            [&](const json& v, const std::string& p) {
                a.name = as_string(v, p);
                named = true;
            }},
           {"lo", num(a.lo)},
           {"hi", num(a.hi)},
           {"count", [&](const json& v, const std::string& p) { a.count = as_count(v, p); }},
           {"include_lo", flag(a.include_lo)}});
    if (!named) throw ConfigError(path + ".name: required");
    return a;
}

}  // namespace

ordered_json to_json(const SweepSpec& s) {
    ordered_json j;
    j["name"] = s.name;
    j["model"] = model_name(s.model);
    j["x"] = axis_json(s.x);
    if (s.y) j["y"] = axis_json(*s.y);
    ordered_json fixed = ordered_json::object();
    for (const auto& [k, v] : s.fixed) fixed[k] = v;
    j["fixed"] = fixed;
    j["seeds"] = s.seeds;
    j["T"] = s.T;
    j["burn_in"] = s.burn_in;
    j["master_seed"] = s.master_seed;
    return j;
}

void read_json(const json& j, SweepSpec& s, const std::string& path) {
    apply(j, path,
          {{"name", [&](const json& v, const std::string& p) { s.name = as_string(v, p); }},
           {"model",
            [&](const json& v, const std::string& p) {
                try {
                    s.model = parse_model(as_string(v, p));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(p + ": " + e.what());
                }
            }},
           {"x", [&](const json& v, const std::string& p) { s.x = read_axis(v, p); }},
           {"y", [&](const json& v, const std::string& p) { s.y = read_axis(v, p); }},
           {"fixed",
            [&](const json& v, const std::string& p) {
                if (!v.is_object()) throw ConfigError(p + ": expected an object");
                s.fixed.clear();
                for (auto it = v.begin(); it != v.end(); ++it) s.fixed[it.key()] = as_number(it.value(), p + "." + it.key());
            }},
           {"seeds", [&](const json& v, const std::string& p) { s.seeds = as_count(v, p); }},
           {"T", [&](const json& v, const std::string& p) { s.T = as_count(v, p); }},
           {"burn_in", num(s.burn_in)},
           {"master_seed", [&](const json& v, const std::string& p) { s.master_seed = as_count(v, p); }}});
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace levcycle
