#pragma once

#include "levcycle/core_model.hpp"
#include "levcycle/stats.hpp"
#include "levcycle/var_equity.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levcycle {

inline constexpr double kUnstableCv = 1e5;
inline constexpr double kBankruptCv = 1e4;
inline constexpr double kStableThreshold = 0.031622776601683794;  // 10^-1.5

double coefficient_of_variation(std::span<const double> series, double burn_in);
std::size_t burn_in_count(std::size_t n, double burn_in);

enum class Classification { stable, cyclic, bankrupt, unstable };
const char* classification_name(Classification c);

struct ClassifiedRun {
    Classification cls = Classification::stable;
    double cv = 0.0;
};

// Degenerate clearing counts as unstable.
ClassifiedRun classify_run(RunStatus status, std::span<const double> prices, double burn_in);
ClassifiedRun classify_run(const VarEquitySeries& run, double burn_in);
ClassifiedRun classify_run(const FullSeries& run, double burn_in);

// Mean over stocks of the post-burn-in price CV.
double full_price_cv(const FullSeries& run, double burn_in);

struct CycleStats {
    std::size_t count = 0;
    double mean_amplitude = 0.0;
    double mean_period = 0.0;
    std::vector<std::size_t> peaks;
    std::vector<std::size_t> troughs;
};

CycleStats cycle_detect(std::span<const double> series, double h = 0.25);

double asset_leverage_correlation(std::span<const double> assets, std::span<const double> leverage);
double asset_leverage_correlation(const VarEquitySeries& run);

enum class SweepModel { full, var_deterministic, var_stochastic };
const char* model_name(SweepModel m);
SweepModel parse_model(const std::string& s);

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 1;
    // false: values lo + (hi-lo)(i+1)/count, i.e. the interval (lo, hi]
    bool include_lo = true;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::string name;
    SweepModel model = SweepModel::var_stochastic;
    Axis x;
    std::optional<Axis> y;
    std::map<std::string, double> fixed;
    std::size_t seeds = 1;
    std::size_t T = 5000;
    double burn_in = 0.2;
    std::uint64_t master_seed = 0;
};

void validate(const SweepSpec& spec);

struct CellResult {
    double x = 0.0;
    double y = 0.0;
    double mean_cv = 0.0;
    double mean_log10_cv = 0.0;
    std::size_t n_stable = 0;
    std::size_t n_cyclic = 0;
    std::size_t n_bankrupt = 0;
    std::size_t n_unstable = 0;
    double mean_max_leverage = 0.0;
    std::vector<double> run_cv;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<double> xs;
    std::vector<double> ys;
    // row-major: cells[iy * xs.size() + ix]
    std::vector<CellResult> cells;
    std::string version;

    const CellResult& at(std::size_t ix, std::size_t iy) const { return cells[iy * xs.size() + ix]; }
};

std::vector<std::string> parameter_names(SweepModel model);
void set_parameter(VarEquityParams& params, const std::string& name, double value);
void set_parameter(SimConfig& cfg, const std::string& name, double value);

std::uint64_t run_seed(std::uint64_t master, std::size_t ix, std::size_t iy, std::size_t seed);

struct RunSummary {
    ClassifiedRun cls;
    double max_leverage = 0.0;
};

RunSummary evaluate_cell_run(const SweepSpec& spec, double x, double y, std::uint64_t seed);

// order: optional evaluation order of cell indices (schedule testing)
SweepResult sweep(const SweepSpec& spec, unsigned jobs = 1, const std::vector<std::size_t>& order = {});

std::vector<SweepSpec> builtin_specs();
std::optional<SweepSpec> find_builtin_spec(const std::string& name);

}  // namespace levcycle
