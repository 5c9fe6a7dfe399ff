#include "levcycle/sweep.hpp"

#include "levcycle/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace levcycle {

std::size_t burn_in_count(std::size_t n, double burn_in) {
    return static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(n) + 1e-9));
}

double coefficient_of_variation(std::span<const double> series, double burn_in) {
    if (!(burn_in >= 0.0 && burn_in < 1.0)) throw MetricError("burn-in fraction must lie in [0,1)");
    const std::size_t skip = burn_in_count(series.size(), burn_in);
    if (series.size() < skip + 2) throw MetricError("series too short after burn-in");
    const auto seg = series.subspan(skip);
    const double m = mean(seg);
    if (!(m > 0.0)) throw MetricError("series mean must be positive");
    return std::sqrt(variance(seg)) / m;
}

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::stable:
            return "stable";
        case Classification::cyclic:
            return "cyclic";
        case Classification::bankrupt:
            return "bankrupt";
        case Classification::unstable:
            return "unstable";
    }
    return "unknown";
}

namespace {

ClassifiedRun from_cv(double cv) {
    return {cv < kStableThreshold ? Classification::stable : Classification::cyclic, cv};
}

}  // namespace

ClassifiedRun classify_run(RunStatus status, std::span<const double> prices, double burn_in) {
    switch (status) {
        case RunStatus::unstable:
        case RunStatus::degenerate:
            return {Classification::unstable, kUnstableCv};
        case RunStatus::bankrupt:
            return {Classification::bankrupt, kBankruptCv};
        case RunStatus::ok:
            break;
    }
    return from_cv(coefficient_of_variation(prices, burn_in));
}

ClassifiedRun classify_run(const VarEquitySeries& run, double burn_in) {
    const std::span<const double> p(run.p);
    return classify_run(run.status, p.empty() ? p : p.subspan(1), burn_in);
}

double full_price_cv(const FullSeries& run, double burn_in) {
    if (run.rows() < 3) throw MetricError("full run too short");
    double total = 0.0;
    std::vector<double> col(run.rows() - 1);
    for (std::size_t i = 0; i < run.n_stocks; ++i) {
        for (std::size_t t = 1; t < run.rows(); ++t) col[t - 1] = run.prices[t][static_cast<Eigen::Index>(i)];
        total += coefficient_of_variation(col, burn_in);
    }
    return total / static_cast<double>(run.n_stocks);
}

ClassifiedRun classify_run(const FullSeries& run, double burn_in) {
    switch (run.status) {
        case RunStatus::unstable:
        case RunStatus::degenerate:
            return {Classification::unstable, kUnstableCv};
        case RunStatus::bankrupt:
            return {Classification::bankrupt, kBankruptCv};
        case RunStatus::ok:
            break;
    }
    return from_cv(full_price_cv(run, burn_in));
}

CycleStats cycle_detect(std::span<const double> series, double h) {
    CycleStats out;
    std::vector<double> val;
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (val.empty() || series[i] != val.back()) {
            val.push_back(series[i]);
            pos.push_back(i);
        }
    }
    const std::size_t r = val.size();
    if (r < 3) return out;
    // +1 local max, -1 local min
    std::vector<std::pair<std::size_t, int>> ext;
    for (std::size_t k = 1; k + 1 < r; ++k) {
        if (val[k] > val[k - 1] && val[k] > val[k + 1]) ext.emplace_back(k, 1);
        else if (val[k] < val[k - 1] && val[k] < val[k + 1]) ext.emplace_back(k, -1);
    }
    if (val[r - 1] < val[r - 2]) ext.emplace_back(r - 1, -1);

    double amp = 0.0;
    for (std::size_t e = 0; e < ext.size(); ++e) {
        if (ext[e].second != 1) continue;
        std::size_t f = e + 1;
        while (f < ext.size() && ext[f].second != -1) ++f;
        if (f == ext.size()) break;
        const double peak = val[ext[e].first];
        const double trough = val[ext[f].first];
        if (peak > (1.0 + h) * trough) {
            out.peaks.push_back(pos[ext[e].first]);
            out.troughs.push_back(pos[ext[f].first]);
            amp += peak - trough;
        }
    }
    out.count = out.peaks.size();
    if (out.count > 0) out.mean_amplitude = amp / static_cast<double>(out.count);
    if (out.count > 1)
        out.mean_period = static_cast<double>(out.peaks.back() - out.peaks.front()) /
                          static_cast<double>(out.count - 1);
    return out;
}

double asset_leverage_correlation(std::span<const double> assets, std::span<const double> leverage) {
    if (assets.size() != leverage.size()) throw MetricError("asset/leverage series length mismatch");
    std::vector<double> da, dl;
    for (std::size_t t = 1; t < assets.size(); ++t) {
        if (assets[t] > 0.0 && assets[t - 1] > 0.0 && leverage[t] > 0.0 && leverage[t - 1] > 0.0) {
            da.push_back(std::log(assets[t] / assets[t - 1]));
            dl.push_back(std::log(leverage[t] / leverage[t - 1]));
        }
    }
    if (da.size() < 10) throw MetricError("fewer than 10 valid steps");
    return pearson(da, dl);
}

double asset_leverage_correlation(const VarEquitySeries& run) {
    return asset_leverage_correlation(run.assets, run.leverage);
}

const char* model_name(SweepModel m) {
    switch (m) {
        case SweepModel::full:
            return "full";
        case SweepModel::var_deterministic:
            return "var-deterministic";
        case SweepModel::var_stochastic:
            return "var-stochastic";
    }
    return "unknown";
}

SweepModel parse_model(const std::string& s) {
    if (s == "full") return SweepModel::full;
    if (s == "var-deterministic") return SweepModel::var_deterministic;
    if (s == "var-stochastic") return SweepModel::var_stochastic;
    throw std::invalid_argument("unknown model '" + s + "' (expected full, var-deterministic, var-stochastic)");
}

std::vector<double> Axis::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (include_lo)
            v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        else
            v[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(count);
    }
    return v;
}

std::vector<std::string> parameter_names(SweepModel model) {
    if (model == SweepModel::full)
        return {"delta", "alpha", "b",   "sigma0", "E0",  "lambda0", "w_c",    "gamma",  "beta",
                "A_N0",  "rho",   "zeta", "eta",   "mu",  "phi",     "pi0",    "active", "var_scale"};
    return {"alpha", "delta",    "b",      "sigma0",      "lambda_m", "E0",    "lambda0",
            "w_B",   "n0",       "xi",     "rho",         "eta",      "policy", "rho_alpha",
            "delta_alpha", "theta", "sigma2_0", "w_N0"};
}

namespace {

[[noreturn]] void unknown_parameter(const std::string& name, SweepModel model) {
    std::string msg = "unknown parameter '" + name + "'; valid names:";
    for (const auto& n : parameter_names(model)) msg += " " + n;
    throw std::invalid_argument(msg);
}

}  // namespace

void set_parameter(VarEquityParams& p, const std::string& name, double v) {
    if (name == "alpha") p.alpha = v;
    else if (name == "delta") p.delta = v;
    else if (name == "b") p.b = v;
    else if (name == "sigma0") p.sigma0 = v;
    else if (name == "lambda_m") p.sigma0 = sigma0_for_max_leverage(v, p.alpha, p.b);
    else if (name == "E0") p.E0 = v;
    else if (name == "lambda0") p.lambda0 = v;
    else if (name == "w_B") p.w_B = v;
    else if (name == "n0") p.n0 = v;
    else if (name == "xi") p.xi = v;
    else if (name == "rho") p.rho = v;
    else if (name == "eta") p.eta = v;
    else if (name == "policy") p.policy = v != 0.0;
    else if (name == "rho_alpha") p.rho_alpha = v;
    else if (name == "delta_alpha") {
        p.delta_alpha = v;
        p.policy = true;
    } else if (name == "theta") {
        p.theta = v;
        p.policy = true;
    } else if (name == "sigma2_0") p.sigma2_0 = v;
    else if (name == "w_N0") p.w_N0 = v;
    else unknown_parameter(name, SweepModel::var_stochastic);
}

void set_parameter(SimConfig& c, const std::string& name, double v) {
    if (name == "delta") c.delta = v;
    else if (name == "alpha") c.alpha = v;
    else if (name == "b") c.b = v;
    else if (name == "sigma0") c.sigma0 = v;
    else if (name == "E0") c.E0 = v;
    else if (name == "lambda0") c.lambda0 = v;
    else if (name == "w_c") c.w_c = v;
    else if (name == "gamma") c.gamma = v;
    else if (name == "beta") c.beta = v;
    else if (name == "A_N0") c.A_N0 = v;
    else if (name == "rho") c.rho = v;
    else if (name == "zeta") c.zeta = v;
    else if (name == "eta") c.eta = v;
    else if (name == "mu") c.mu = v;
    else if (name == "phi") c.phi = v;
    else if (name == "pi0") c.pi0 = v;
    else if (name == "active") c.active = v != 0.0;
    else if (name == "var_scale") c.var_scale = v;
    else unknown_parameter(name, SweepModel::full);
}

void validate(const SweepSpec& spec) {
    auto check_axis = [](const Axis& a) {
        if (a.count < 1) throw std::invalid_argument("axis " + a.name + ": count must be >= 1");
        if (!(std::isfinite(a.lo) && std::isfinite(a.hi)) || a.hi < a.lo)
            throw std::invalid_argument("axis " + a.name + ": need finite lo <= hi");
    };
    check_axis(spec.x);
    if (spec.y) check_axis(*spec.y);
    if (spec.seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    if (spec.T < 1) throw std::invalid_argument("T must be >= 1");
    if (!(spec.burn_in >= 0.0 && spec.burn_in < 1.0)) throw std::invalid_argument("burn_in must lie in [0,1)");
    const auto names = parameter_names(spec.model);
    auto check = [&](const std::string& n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) unknown_parameter(n, spec.model);
    };
    check(spec.x.name);
    if (spec.y) check(spec.y->name);
    for (const auto& [k, v] : spec.fixed) check(k);
}

std::uint64_t run_seed(std::uint64_t master, std::size_t ix, std::size_t iy, std::size_t seed) {
    return derive_seed(master, {static_cast<std::uint64_t>(ix), static_cast<std::uint64_t>(iy),
                                static_cast<std::uint64_t>(seed)});
}

namespace {

template <class P>
void apply_all(P& params, const SweepSpec& spec, double x, double y) {
    std::vector<std::pair<std::string, double>> assign(spec.fixed.begin(), spec.fixed.end());
    assign.emplace_back(spec.x.name, x);
    if (spec.y) assign.emplace_back(spec.y->name, y);
    // lambda_m depends on alpha and b, so it goes last
    std::stable_partition(assign.begin(), assign.end(), [](const auto& kv) { return kv.first != "lambda_m"; });
    for (const auto& [k, v] : assign) set_parameter(params, k, v);
}

}  // namespace

RunSummary evaluate_cell_run(const SweepSpec& spec, double x, double y, std::uint64_t seed) {
    RunSummary out;
    if (spec.model == SweepModel::full) {
        SimConfig cfg;
        apply_all(cfg, spec, x, y);
        cfg.T = spec.T;
        cfg.seed = seed;
        const FullSeries run = run_full(cfg);
        out.cls = classify_run(run, spec.burn_in);
        for (double l : run.leverage) out.max_leverage = std::max(out.max_leverage, l);
        return out;
    }
    VarEquityParams params;
    apply_all(params, spec, x, y);
    const NoiseMode mode = spec.model == SweepModel::var_deterministic ? NoiseMode::deterministic : NoiseMode::stochastic;
    const VarEquitySeries run = run_var_equity(params, mode, spec.T, seed);
    out.cls = classify_run(run, spec.burn_in);
    for (double l : run.leverage) out.max_leverage = std::max(out.max_leverage, l);
    return out;
}

SweepResult sweep(const SweepSpec& spec, unsigned jobs, const std::vector<std::size_t>& order) {
    validate(spec);
    SweepResult res;
    res.spec = spec;
    res.version = LEVCYCLE_VERSION;
    res.xs = spec.x.values();
    res.ys = spec.y ? spec.y->values() : std::vector<double>{0.0};
    const std::size_t nx = res.xs.size(), ny = res.ys.size();
    const std::size_t ncell = nx * ny;
    res.cells.resize(ncell);

    std::vector<std::size_t> sched = order;
    if (sched.empty()) {
        sched.resize(ncell);
        std::iota(sched.begin(), sched.end(), 0);
    }
    if (sched.size() != ncell) throw std::invalid_argument("sweep: evaluation order must list every cell once");

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < sched.size(); k = next++) {
            const std::size_t idx = sched[k];
            const std::size_t ix = idx % nx, iy = idx / nx;
            CellResult cell;
            cell.x = res.xs[ix];
            cell.y = res.ys[iy];
            cell.run_cv.resize(spec.seeds);
            double sum_cv = 0.0, sum_lev = 0.0;
            for (std::size_t s = 0; s < spec.seeds; ++s) {
                const RunSummary r = evaluate_cell_run(spec, cell.x, cell.y, run_seed(spec.master_seed, ix, iy, s));
                cell.run_cv[s] = r.cls.cv;
                sum_cv += r.cls.cv;
                sum_lev += r.max_leverage;
                switch (r.cls.cls) {
                    case Classification::stable:
                        ++cell.n_stable;
                        break;
                    case Classification::cyclic:
                        ++cell.n_cyclic;
                        break;
                    case Classification::bankrupt:
                        ++cell.n_bankrupt;
                        break;
                    case Classification::unstable:
                        ++cell.n_unstable;
                        break;
                }
            }
            cell.mean_cv = sum_cv / static_cast<double>(spec.seeds);
            cell.mean_log10_cv = std::log10(std::max(cell.mean_cv, 1e-300));
            cell.mean_max_leverage = sum_lev / static_cast<double>(spec.seeds);
            res.cells[idx] = std::move(cell);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ncell)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    return res;
}

std::vector<SweepSpec> builtin_specs() {
    std::vector<SweepSpec> out;
    {
        SweepSpec s;
        s.name = "paper-alpha-delta";
        s.model = SweepModel::var_stochastic;
        s.x = {"alpha", 0.0, 0.7, 70, false};
        s.y = Axis{"delta", 0.0, 0.5, 50, false};
        s.fixed = {{"b", -0.5}, {"sigma0", 0.0}};
        s.seeds = 40;
        s.T = 5000;
        out.push_back(s);
    }
    {
        SweepSpec s;
        s.name = "paper-alpha-b";
        s.model = SweepModel::var_deterministic;
        s.x = {"alpha", 0.0, 300.0, 70, false};
        s.y = Axis{"b", -0.5, 0.5, 50, true};
        s.fixed = {{"delta", 0.1}, {"sigma0", 0.0}};
        s.seeds = 1;
        s.T = 5000;
        out.push_back(s);
    }
    {
        SweepSpec s;
        s.name = "paper-policy";
        s.model = SweepModel::var_deterministic;
        s.x = {"theta", 0.0, 7.0, 71, true};
        s.y = Axis{"delta_alpha", 0.0, 0.7, 21, true};
        s.fixed = {{"alpha", 0.1}, {"delta", 0.1}, {"b", -0.5}, {"sigma0", 0.0}, {"policy", 1.0}};
        s.seeds = 1;
        s.T = 5000;
        out.push_back(s);
    }
    {
        SweepSpec s;
        s.name = "paper-leverage-limit";
        s.model = SweepModel::var_stochastic;
        s.x = {"lambda_m", 1.0, 100.0, 34, true};
        s.fixed = {{"alpha", 0.2}, {"delta", 0.1}, {"b", -0.5}};
        s.seeds = 40;
        s.T = 5000;
        out.push_back(s);
    }
    {
        SweepSpec s;
        s.name = "active-passive";
        s.model = SweepModel::full;
        s.x = {"active", 0.0, 1.0, 2, true};
        s.seeds = 40;
        s.T = 2000;
        out.push_back(s);
    }
    return out;
}

std::optional<SweepSpec> find_builtin_spec(const std::string& name) {
    for (auto& s : builtin_specs())
        if (s.name == name) return s;
    return std::nullopt;
}

}  // namespace levcycle
