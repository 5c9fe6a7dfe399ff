#include "levcycle/config.hpp"
#include "levcycle/core_model.hpp"
#include "levcycle/output.hpp"
#include "levcycle/reduced_2d.hpp"
#include "levcycle/sweep.hpp"
#include "levcycle/var_equity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace levcycle;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> T;
    std::string out = "out";
    unsigned jobs = 1;
    std::optional<std::string> format;
    std::string config;
};

unsigned default_jobs() {
    if (const char* env = std::getenv("LEVCYCLE_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--T", c.T, "Horizon in steps");
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--jobs", c.jobs, "Worker threads (default: LEVCYCLE_JOBS or hardware threads)");
    app->add_option("--format", c.format, "Output format: csv (default) or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--config", c.config, "JSON config file or a manifest from an earlier run");
}

// Config document plus run options recovered from a manifest, if the file is one.
struct Loaded {
    json doc = json::object();
    json run = json::object();
    std::string format = "csv";
};

std::string output_format(const Common& c, const Loaded& l) { return c.format ? *c.format : l.format; }

Loaded load_config(const std::string& path, const std::string& subcommand) {
    Loaded l;
    if (path.empty()) return l;
    json j = load_json_file(path);
    if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
    if (j.contains("tool") && j["tool"] == "levcycle") {
        if (j.value("subcommand", "") != subcommand)
            throw ConfigError(path + ": manifest was written by '" + j.value("subcommand", "") + "'");
        l.doc = j.at("config");
        l.format = j.value("format", "csv");
        if (l.format != "csv" && l.format != "json") throw ConfigError(path + ".format: expected csv or json");
        if (l.doc.contains("run")) {
            l.run = l.doc["run"];
            l.doc.erase("run");
        }
        return l;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (k != "full" && k != "var_equity" && k != "reduced_2d" && k != "sweep")
            throw ConfigError(path + "." + k + ": unknown section");
    }
    l.doc = j;
    return l;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, std::uint64_t seed, const std::string& format,
                    const ordered_json& config) {
    ordered_json m;
    m["tool"] = "levcycle";
    m["version"] = LEVCYCLE_VERSION;
    m["subcommand"] = subcommand;
    m["master_seed"] = seed;
    m["output_dir"] = dir.string();
    m["format"] = format;
    m["config"] = config;
    std::ofstream os(dir / "manifest.json");
    os << m.dump(2) << '\n';
    if (!os) throw std::runtime_error("failed to write manifest in " + dir.string());
}

template <class Fn>
void write_file(const fs::path& p, Fn&& fn) {
    std::ofstream os(p, std::ios::binary);
    fn(os);
    if (!os) throw std::runtime_error("failed to write " + p.string());
}

int cmd_run_full(const Common& c, bool passive, const std::string& allocator) {
    const Loaded l = load_config(c.config, "run-full");
    const std::string format = output_format(c, l);
    SimConfig cfg;
    if (l.doc.contains("full")) read_json(l.doc["full"], cfg);
    if (c.seed) cfg.seed = *c.seed;
    if (c.T) cfg.T = *c.T;
    if (passive) cfg.active = false;
    if (!allocator.empty()) cfg.allocator = allocator == "optimizer" ? Allocator::optimizer : Allocator::softmax;
    validate(cfg);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    ordered_json resolved;
    resolved["full"] = to_json(cfg);
    write_manifest(dir, "run-full", cfg.seed, format, resolved);
    const FullSeries run = run_full(cfg);
    if (format == "csv")
        write_file(dir / "run_full.csv", [&](std::ostream& os) { write_full_csv(os, run); });
    else
        write_file(dir / "run_full.json", [&](std::ostream& os) { os << full_to_json(run).dump() << '\n'; });
    std::cerr << "run-full: " << status_name(run.status) << " after " << run.steps_completed << " steps\n";
    return 0;
}

int cmd_run_2d(const Common& c, std::optional<double> delta, std::optional<double> jitter) {
    const Loaded l = load_config(c.config, "run-2d");
    const std::string format = output_format(c, l);
    Run2DConfig cfg;
    if (l.doc.contains("reduced_2d")) read_json(l.doc["reduced_2d"], cfg);
    std::size_t T = l.run.value("T", std::size_t{20000});
    std::uint64_t seed = l.run.value("seed", std::uint64_t{0});
    if (c.T) T = *c.T;
    if (c.seed) seed = *c.seed;
    if (delta) cfg.map.delta = *delta;
    if (jitter) cfg.jitter = *jitter;
    if (!(cfg.map.delta > 0.0 && cfg.map.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");

    const fs::path dir(c.out);
    fs::create_directories(dir);
    ordered_json resolved;
    resolved["reduced_2d"] = to_json(cfg);
    resolved["run"] = {{"T", T}, {"seed", seed}};
    write_manifest(dir, "run-2d", seed, format, resolved);
    const Trajectory2D traj = run_2d(cfg.z0, cfg.map, T, cfg.jitter, seed);
    if (format == "csv")
        write_file(dir / "run_2d.csv", [&](std::ostream& os) { write_2d_csv(os, traj, cfg.map.delta); });
    else
        write_file(dir / "run_2d.json",
                   [&](std::ostream& os) { os << traj_to_json(traj, cfg.map.delta).dump() << '\n'; });
    return 0;
}

struct VarFlags {
    std::string mode;
    std::optional<double> theta, delta_alpha, alpha, delta, b, sigma0, xi;
    bool no_policy = false;
};

int cmd_run_var(const Common& c, const VarFlags& f) {
    const Loaded l = load_config(c.config, "run-var");
    const std::string format = output_format(c, l);
    VarEquityParams p;
    if (l.doc.contains("var_equity")) read_json(l.doc["var_equity"], p);
    std::string mode = l.run.value("mode", std::string("deterministic"));
    std::size_t T = l.run.value("T", std::size_t{5000});
    std::uint64_t seed = l.run.value("seed", std::uint64_t{0});
    if (!f.mode.empty()) mode = f.mode;
    if (c.T) T = *c.T;
    if (c.seed) seed = *c.seed;
    if (f.alpha) p.alpha = *f.alpha;
    if (f.delta) p.delta = *f.delta;
    if (f.b) p.b = *f.b;
    if (f.sigma0) p.sigma0 = *f.sigma0;
    if (f.xi) p.xi = *f.xi;
    if (f.theta) {
        p.theta = *f.theta;
        p.policy = true;
    }
    if (f.delta_alpha) {
        p.delta_alpha = *f.delta_alpha;
        p.policy = true;
    }
    if (f.no_policy) {
        p.policy = false;
        p.theta = 0.0;
    }
    validate(p);
    const NoiseMode nm = mode == "stochastic" ? NoiseMode::stochastic : NoiseMode::deterministic;

    const fs::path dir(c.out);
    fs::create_directories(dir);
    ordered_json resolved;
    resolved["var_equity"] = to_json(p);
    resolved["run"] = {{"mode", mode}, {"T", T}, {"seed", seed}};
    write_manifest(dir, "run-var", seed, format, resolved);
    const VarEquitySeries run = run_var_equity(p, nm, T, seed);
    if (format == "csv")
        write_file(dir / "run_var.csv", [&](std::ostream& os) { write_var_csv(os, run); });
    else
        write_file(dir / "run_var.json", [&](std::ostream& os) { os << var_to_json(run).dump() << '\n'; });
    std::cerr << "run-var: " << status_name(run.status) << " after " << run.steps_completed << " steps\n";
    return 0;
}

int cmd_sweep(const Common& c, const std::string& name, std::optional<std::size_t> seeds) {
    const Loaded l = load_config(c.config, "sweep");
    const std::string format = output_format(c, l);
    SweepSpec spec;
    bool have = false;
    if (!name.empty()) {
        auto b = find_builtin_spec(name);
        if (!b) throw ConfigError("unknown built-in spec '" + name + "' (see list-specs)");
        spec = *b;
        have = true;
    }
    if (l.doc.contains("sweep")) {
        read_json(l.doc["sweep"], spec);
        have = true;
    }
    if (!have) throw ConfigError("sweep needs a built-in spec name or a config with a 'sweep' section");
    if (c.seed) spec.master_seed = *c.seed;
    if (c.T) spec.T = *c.T;
    if (seeds) spec.seeds = *seeds;
    validate(spec);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    ordered_json resolved;
    resolved["sweep"] = to_json(spec);
    write_manifest(dir, "sweep", spec.master_seed, format, resolved);
    const SweepResult res = sweep(spec, c.jobs);
    if (format == "csv") {
        write_file(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res); });
    } else {
        write_file(dir / "sweep.json", [&](std::ostream& os) {
            ordered_json rows = ordered_json::array();
            for (const auto& cell : res.cells)
                rows.push_back({{"axisX_value", cell.x},
                                {"axisY_value", cell.y},
                                {"mean_log10_cv", cell.mean_log10_cv},
                                {"n_stable", cell.n_stable},
                                {"n_cyclic", cell.n_cyclic},
                                {"n_bankrupt", cell.n_bankrupt},
                                {"n_unstable", cell.n_unstable}});
            os << rows.dump() << '\n';
        });
    }
    write_file(dir / "sweep_spec.json", [&](std::ostream& os) { os << sweep_sidecar(res).dump(2) << '\n'; });
    return 0;
}

int cmd_list_specs() {
    for (const auto& s : builtin_specs()) {
        std::cout << s.name << "  model=" << model_name(s.model) << "  x=" << s.x.name << "[" << s.x.lo << ","
                  << s.x.hi << "]x" << s.x.count;
        if (s.y) std::cout << "  y=" << s.y->name << "[" << s.y->lo << "," << s.y->hi << "]x" << s.y->count;
        std::cout << "  seeds=" << s.seeds << "  T=" << s.T << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leverage-cycle simulation engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LEVCYCLE_VERSION);

    Common full_c, d2_c, var_c, sw_c;
    for (Common* c : {&full_c, &d2_c, &var_c, &sw_c}) c->jobs = default_jobs();

    auto* full = app.add_subcommand("run-full", "Full multi-asset model");
    add_common(full, full_c);
    bool passive = false;
    std::string allocator;
    full->add_flag("--passive", passive, "Passive leverage management (no balance-sheet trades)");
    full->add_option("--allocator", allocator, "Portfolio allocator")->check(CLI::IsMember({"softmax", "optimizer"}));

    auto* d2 = app.add_subcommand("run-2d", "Constant-equity 2D map");
    add_common(d2, d2_c);
    std::optional<double> d2_delta, d2_jitter;
    d2->add_option("--delta", d2_delta, "Smoothing parameter");
    d2->add_option("--jitter", d2_jitter, "Multiplicative jitter amplitude on z1");

    auto* var = app.add_subcommand("run-var", "Variable-equity reduced model");
    add_common(var, var_c);
    VarFlags vf;
    var->add_option("--mode", vf.mode, "Noise-trader regime")->check(CLI::IsMember({"deterministic", "stochastic"}));
    var->add_option("--theta", vf.theta, "Policy aggressiveness (enables the policy rule)");
    var->add_option("--delta-alpha", vf.delta_alpha, "Policy trend smoothing (enables the policy rule)");
    var->add_flag("--no-policy", vf.no_policy, "Fixed alpha");
    var->add_option("--alpha", vf.alpha, "Risk parameter");
    var->add_option("--delta", vf.delta, "Variance smoothing");
    var->add_option("--b", vf.b, "Cyclicality parameter");
    var->add_option("--sigma0", vf.sigma0, "Perceived-risk floor");
    var->add_option("--xi", vf.xi, "Equity redistribution rate");

    auto* sw = app.add_subcommand("sweep", "Parameter sweep");
    add_common(sw, sw_c);
    std::string spec_name;
    std::optional<std::size_t> seeds;
    sw->add_option("spec", spec_name, "Built-in spec name");
    sw->add_option("--seeds", seeds, "Override seeds per cell");

    auto* ls = app.add_subcommand("list-specs", "List built-in sweep specs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*full) return cmd_run_full(full_c, passive, allocator);
        if (*d2) return cmd_run_2d(d2_c, d2_delta, d2_jitter);
        if (*var) return cmd_run_var(var_c, vf);
        if (*sw) return cmd_sweep(sw_c, spec_name, seeds);
        if (*ls) return cmd_list_specs();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
