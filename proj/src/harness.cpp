#include "gustnav/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace gustnav {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::unique_ptr<Estimator> make_estimator(const ScenarioConfig& cfg, const FilterSetup& setup) {
    const ProcessModel model = quadrotor_process_model(cfg.quad);
    GaussianBelief init;
    init.mean = cfg.initial;
    init.cov  = setup.p0_diag.asDiagonal();

    switch (setup.kind) {
    case FilterKind::Ekf:
        return std::make_unique<EkfEstimator>(init, setup.noise, model);
    case FilterKind::Ukf:
        return std::make_unique<UkfEstimator>(init, setup.noise, setup.ukf, model);
    case FilterKind::Pf: {
        Vec6 spread = setup.p0_diag.array().sqrt();
        return std::make_unique<PfEstimator>(cfg.initial, spread, setup.particles, setup.noise,
                                             model, cfg.seed);
    }
    }
    throw ConfigError("unknown filter kind");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot trajectory.csv and gusts.csv produced alongside this script."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

out_dir = os.path.dirname(os.path.abspath(__file__))


def read_csv(name):
    with open(os.path.join(out_dir, name)) as f:
        rows = list(csv.reader(f))
    header, data = rows[0], rows[1:]
    cols = {name: [float(r[i]) for r in data] for i, name in enumerate(header)}
    return header, cols


header, tr = read_csv("trajectory.csv")
filters = sorted({c.split("_est_")[0] for c in header if "_est_" in c})

fig, axes = plt.subplots(2, 1, figsize=(11, 7), sharex=True)
for ax, ch, label in zip(axes, ("pn", "h"), ("northward position [m]", "altitude [m]")):
    ax.plot(tr["t"], tr[f"meas_{ch}"], ".", ms=1, color="0.7", label="measured")
    ax.plot(tr["t"], tr[f"truth_{ch}"], "k-", lw=1.2, label="true")
    for f in filters:
        ax.plot(tr["t"], tr[f"{f}_est_{ch}"], lw=1.0, label=f"{f} estimate")
    ax.set_ylabel(label)
    ax.legend(loc="best", fontsize=8)
axes[-1].set_xlabel("time [s]")
fig.tight_layout()
fig.savefig(os.path.join(out_dir, "positions.png"), dpi=140)

try:
    _, gu = read_csv("gusts.csv")
    fig2, ax = plt.subplots(figsize=(11, 3.2))
    ax.plot(gu["t"], gu["u_g"], lw=0.8, label="u_g")
    ax.plot(gu["t"], gu["w_g"], lw=0.8, label="w_g")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("gust velocity [m/s]")
    ax.legend(loc="best", fontsize=8)
    fig2.tight_layout()
    fig2.savefig(os.path.join(out_dir, "gusts.png"), dpi=140)
except FileNotFoundError:
    pass

print("wrote plots to", out_dir)
)PY";

} // namespace

TruthRun run_truth(const ScenarioConfig& cfg) {
    cfg.validate();

    const std::size_t n = cfg.step_count();
    if (n < 1)
        throw ConfigError("duration: must cover at least one step of dt");

    TruthRun run;
    run.t.reserve(n + 1);
    run.truth.reserve(n + 1);
    run.gusts.reserve(n + 1);
    run.meas.reserve(n + 1);

    std::unique_ptr<VonKarmanGenerator> turb;
    if (cfg.turbulence.enabled)
        turb = std::make_unique<VonKarmanGenerator>(cfg.turbulence.resolve(),
                                                    cfg.turbulence.active, cfg.seed);
    RandomStream meas_rng(sub_seed(cfg.seed, Stream::Measurement));

    auto measure = [&](const StateVector& x) {
        Vec2 z = measurement(x);
        z(0) += cfg.meas_noise_std(0) * meas_rng.normal();
        z(1) += cfg.meas_noise_std(1) * meas_rng.normal();
        return z;
    };

    StateVector x = cfg.initial;
    x.theta       = wrap_pi(x.theta);
    run.t.push_back(0.0);
    run.truth.push_back(x);
    run.gusts.push_back(turb ? turb->gust() : GustSample{});
    run.meas.push_back(measure(x));

    for (std::size_t k = 1; k <= n; ++k) {
        const double t_prev = double(k - 1) * cfg.dt;
        GustSample gust;
        if (turb) {
            turb->step(cfg.dt);
            gust = turb->gust(); // held constant over the dynamics step
        }
        x = step_rk4(x, cfg.control_at(t_prev), cfg.quad, gust, cfg.dt);
        run.t.push_back(double(k) * cfg.dt);
        run.truth.push_back(x);
        run.gusts.push_back(gust);
        run.meas.push_back(measure(x));
    }
    return run;
}

FilterTrace run_filter_trace(const TruthRun& truth, const ScenarioConfig& cfg,
                             const FilterSetup& setup) {
    using clock = std::chrono::steady_clock;

    FilterTrace trace;
    trace.kind          = setup.kind;
    const std::size_t n = truth.t.size();
    trace.est.reserve(n);
    trace.var_pos.reserve(n);

    auto est = make_estimator(cfg, setup);
    trace.est.push_back(est->mean());
    trace.var_pos.push_back(est->position_variance());

    for (std::size_t k = 1; k < n; ++k) {
        const ControlInput c = cfg.control_at(truth.t[k - 1]);
        const auto t0        = clock::now();
        bool failed          = false;
        try {
            est->predict(c, cfg.dt);
            est->update(truth.meas[k]);
        } catch (const NumericsError&) {
            failed = true; // keep the last healthy belief and continue
        }
        const auto t1 = clock::now();
        trace.filter_seconds += std::chrono::duration<double>(t1 - t0).count();
        ++trace.steps;
        if (failed || est->last_step_degenerate())
            trace.degenerate_steps.push_back(std::uint32_t(k));
        trace.est.push_back(est->mean());
        trace.var_pos.push_back(est->position_variance());
    }
    return trace;
}

RunResult run_comparison(const ScenarioConfig& cfg, const std::vector<FilterSetup>& filters) {
    if (filters.empty())
        throw ConfigError("at least one filter must be selected");
    RunResult result;
    result.truth = run_truth(cfg);
    for (const auto& setup : filters)
        result.traces.push_back(run_filter_trace(result.truth, cfg, setup));
    return result;
}

namespace {

ChannelMetrics channel_metrics(const std::vector<double>& ref, const std::vector<double>& series) {
    ChannelMetrics m;
    double sq = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double d = series[i] - ref[i];
        sq += d * d;
    }
    m.rmse = std::sqrt(sq / double(series.size()));
    for (std::size_t i = 1; i < series.size(); ++i)
        m.total_variation += std::abs(series[i] - series[i - 1]);
    return m;
}

} // namespace

Metrics compute_metrics(const RunResult& result) {
    const std::size_t n = result.truth.t.size();
    std::vector<double> truth_pn(n), truth_h(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth_pn[i] = result.truth.truth[i].p_n;
        truth_h[i]  = result.truth.truth[i].h;
    }

    Metrics m;
    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = result.truth.meas[i](0);
    m.meas_pn = channel_metrics(truth_pn, tmp);
    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = result.truth.meas[i](1);
    m.meas_h = channel_metrics(truth_h, tmp);

    for (const auto& trace : result.traces) {
        FilterMetrics fm;
        fm.kind = trace.kind;
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = trace.est[i].p_n;
        fm.pn = channel_metrics(truth_pn, tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = trace.est[i].h;
        fm.h                 = channel_metrics(truth_h, tmp);
        fm.mean_step_seconds = trace.steps > 0 ? trace.filter_seconds / double(trace.steps) : 0.0;
        fm.degenerate_count  = trace.degenerate_steps.size();
        m.filters.push_back(fm);
    }
    return m;
}

void write_outputs(const RunResult& result, const Metrics& metrics, const ScenarioConfig& cfg,
                   const std::string& out_dir) {
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    const std::size_t n = result.truth.t.size();

    // trajectory.csv
    {
        std::ostringstream csv;
        csv << "t,truth_pn,truth_h,truth_u,truth_w,truth_theta,truth_q,meas_pn,meas_h";
        for (const auto& tr : result.traces) {
            const std::string f = filter_name(tr.kind);
            csv << ',' << f << "_est_pn," << f << "_est_h," << f << "_est_u," << f << "_est_w,"
                << f << "_est_theta," << f << "_est_q," << f << "_var_pn," << f << "_var_h";
        }
        csv << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            const StateVector& x = result.truth.truth[i];
            csv << g17(result.truth.t[i]) << ',' << g17(x.p_n) << ',' << g17(x.h) << ','
                << g17(x.u) << ',' << g17(x.w) << ',' << g17(x.theta) << ',' << g17(x.q) << ','
                << g17(result.truth.meas[i](0)) << ',' << g17(result.truth.meas[i](1));
            for (const auto& tr : result.traces) {
                const StateVector& e = tr.est[i];
                csv << ',' << g17(e.p_n) << ',' << g17(e.h) << ',' << g17(e.u) << ',' << g17(e.w)
                    << ',' << g17(e.theta) << ',' << g17(e.q) << ',' << g17(tr.var_pos[i](0))
                    << ',' << g17(tr.var_pos[i](1));
            }
            csv << '\n';
        }
        write_file(dir / "trajectory.csv", csv.str());
    }

    // gusts.csv
    {
        std::ostringstream csv;
        csv << "t,u_g,w_g\n";
        for (std::size_t i = 0; i < n; ++i)
            csv << g17(result.truth.t[i]) << ',' << g17(result.truth.gusts[i].u_g) << ','
                << g17(result.truth.gusts[i].w_g) << '\n';
        write_file(dir / "gusts.csv", csv.str());
    }

    // metrics.csv
    {
        std::ostringstream csv;
        csv << "series,rmse_pn,rmse_h,tv_pn,tv_h,mean_step_wall_s,degenerate_steps\n";
        csv << "meas," << g17(metrics.meas_pn.rmse) << ',' << g17(metrics.meas_h.rmse) << ','
            << g17(metrics.meas_pn.total_variation) << ',' << g17(metrics.meas_h.total_variation)
            << ",0,0\n";
        for (const auto& fm : metrics.filters)
            csv << filter_name(fm.kind) << ',' << g17(fm.pn.rmse) << ',' << g17(fm.h.rmse) << ','
                << g17(fm.pn.total_variation) << ',' << g17(fm.h.total_variation) << ','
                << g17(fm.mean_step_seconds) << ',' << fm.degenerate_count << '\n';
        write_file(dir / "metrics.csv", csv.str());
    }

    // run.json: resolved config echo plus derived stream seeds
    {
        nlohmann::json j;
        j["config"] = nlohmann::json::parse(config_to_json_text(cfg));
        j["seeds"]  = {{"turbulence_u", sub_seed(cfg.seed, Stream::TurbulenceU)},
                       {"turbulence_v", sub_seed(cfg.seed, Stream::TurbulenceV)},
                       {"turbulence_w", sub_seed(cfg.seed, Stream::TurbulenceW)},
                       {"measurement", sub_seed(cfg.seed, Stream::Measurement)},
                       {"particles", sub_seed(cfg.seed, Stream::Particles)},
                       {"particle_init", sub_seed(cfg.seed, Stream::ParticleInit)},
                       {"ga", sub_seed(cfg.seed, Stream::Ga)}};
        nlohmann::json ran = nlohmann::json::array();
        for (const auto& tr : result.traces)
            ran.push_back(filter_name(tr.kind));
        j["filters_run"] = ran;
        write_file(dir / "run.json", j.dump(2) + "\n");
    }

    write_file(dir / "plot_results.py", kPlotScript);
}

} // namespace gustnav
