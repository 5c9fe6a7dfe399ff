#include "levcycle/output.hpp"

#include "levcycle/config.hpp"

#include <cmath>
#include <cstdio>

namespace levcycle {

using nlohmann::ordered_json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void cell(std::ostream& os, double x) { os << ',' << format_double(x); }

void header_block(std::ostream& os, const char* prefix, std::size_t n) {
    for (std::size_t i = 1; i <= n; ++i) os << ',' << prefix << i;
}

// lambda_minus as a real value (real part when complex), lambda_plus as modulus
std::pair<double, double> eigen_columns(const State2D& z, double delta) {
    const EigenPairs2D e = eigen_closed_form(z, delta);
    return {e.lambda_minus.real(), std::abs(e.lambda_plus)};
}

}  // namespace

void write_full_csv(std::ostream& os, const FullSeries& run) {
    const std::size_t n = run.n_stocks;
    os << 't';
    header_block(os, "p_", n);
    header_block(os, "pi_", n);
    header_block(os, "rhat_", n);
    header_block(os, "w_", n);
    os << ",leverage,sigmaP2,equity_bank,equity_nt\n";
    for (std::size_t t = 0; t < run.rows(); ++t) {
        os << t;
        for (const auto* v : {&run.prices[t], &run.dividends[t], &run.rhat[t], &run.weights[t]})
            for (Eigen::Index i = 0; i < v->size(); ++i) cell(os, (*v)[i]);
        cell(os, run.leverage[t]);
        cell(os, run.sigma_p2[t]);
        cell(os, run.equity_bank[t]);
        cell(os, run.equity_nt[t]);
        os << '\n';
    }
}

void write_var_csv(std::ostream& os, const VarEquitySeries& run) {
    os << "t,p,leverage,assets,liabilities,n,w_N,alpha,q,equity_bank\n";
    for (std::size_t t = 0; t < run.rows(); ++t) {
        os << t;
        cell(os, run.p[t]);
        cell(os, run.leverage[t]);
        cell(os, run.assets[t]);
        cell(os, run.liabilities[t]);
        cell(os, run.n[t]);
        cell(os, run.w_N[t]);
        cell(os, run.alpha[t]);
        cell(os, run.q[t]);
        cell(os, run.equity_bank[t]);
        os << '\n';
    }
}

void write_2d_csv(std::ostream& os, const Trajectory2D& traj, double delta) {
    os << "t,z1,z2,price,lambda_minus,lambda_plus_abs\n";
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const auto [lm, lp] = eigen_columns(traj.states[t], delta);
        os << t;
        cell(os, traj.states[t].z1);
        cell(os, traj.states[t].z2);
        cell(os, traj.prices[t]);
        cell(os, lm);
        cell(os, lp);
        os << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    os << "axisX_value,axisY_value,mean_log10_cv,n_stable,n_cyclic,n_bankrupt,n_unstable\n";
    for (const CellResult& c : res.cells) {
        os << format_double(c.x) << ',' << format_double(c.y) << ',' << format_double(c.mean_log10_cv) << ','
           << c.n_stable << ',' << c.n_cyclic << ',' << c.n_bankrupt << ',' << c.n_unstable << '\n';
    }
}

namespace {

ordered_json vec_json(const Vec& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

}  // namespace

ordered_json full_to_json(const FullSeries& run) {
    ordered_json j;
    j["status"] = status_name(run.status);
    j["steps_completed"] = run.steps_completed;
    ordered_json rows = ordered_json::array();
    for (std::size_t t = 0; t < run.rows(); ++t) {
        ordered_json r;
        r["t"] = t;
        r["p"] = vec_json(run.prices[t]);
        r["pi"] = vec_json(run.dividends[t]);
        r["rhat"] = vec_json(run.rhat[t]);
        r["w"] = vec_json(run.weights[t]);
        r["leverage"] = run.leverage[t];
        r["sigmaP2"] = run.sigma_p2[t];
        r["equity_bank"] = run.equity_bank[t];
        r["equity_nt"] = run.equity_nt[t];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

ordered_json var_to_json(const VarEquitySeries& run) {
    ordered_json j;
    j["status"] = status_name(run.status);
    j["steps_completed"] = run.steps_completed;
    ordered_json rows = ordered_json::array();
    for (std::size_t t = 0; t < run.rows(); ++t) {
        ordered_json r;
        r["t"] = t;
        r["p"] = run.p[t];
        r["leverage"] = run.leverage[t];
        r["assets"] = run.assets[t];
        r["liabilities"] = run.liabilities[t];
        r["n"] = run.n[t];
        r["w_N"] = run.w_N[t];
        r["alpha"] = run.alpha[t];
        r["q"] = run.q[t];
        r["equity_bank"] = run.equity_bank[t];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

ordered_json traj_to_json(const Trajectory2D& traj, double delta) {
    ordered_json rows = ordered_json::array();
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const auto [lm, lp] = eigen_columns(traj.states[t], delta);
        ordered_json r;
        r["t"] = t;
        r["z1"] = traj.states[t].z1;
        r["z2"] = traj.states[t].z2;
        r["price"] = traj.prices[t];
        r["lambda_minus"] = lm;
        r["lambda_plus_abs"] = lp;
        rows.push_back(std::move(r));
    }
    ordered_json j;
    j["rows"] = std::move(rows);
    return j;
}

ordered_json sweep_sidecar(const SweepResult& res) {
    ordered_json j;
    j["spec"] = to_json(res.spec);
    j["version"] = res.version;
    j["x_name"] = res.spec.x.name;
    j["y_name"] = res.spec.y ? res.spec.y->name : "";
    return j;
}

}  // namespace levcycle
