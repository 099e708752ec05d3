#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "gustnav/harness.hpp"

using namespace gustnav;
namespace fs = std::filesystem;

namespace {

ScenarioConfig hover_config(double duration = 100.0) {
    ScenarioConfig cfg      = ScenarioConfig::defaults();
    cfg.duration            = duration;
    cfg.turbulence.enabled  = false;
    cfg.meas_noise_std      = Vec2(0.0, 0.0);
    return cfg;
}

ScenarioConfig disturbed_config(double duration = 100.0) {
    ScenarioConfig cfg                   = ScenarioConfig::defaults();
    cfg.duration                         = duration;
    cfg.turbulence.enabled               = true;
    cfg.turbulence.conditions.altitude   = 10.0;
    cfg.turbulence.conditions.wind_speed = 70.0;
    cfg.meas_noise_std                   = Vec2(0.1, 0.1);
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("hover truth stays constant without noise or turbulence") {
    const TruthRun run = run_truth(hover_config(100.0));
    REQUIRE(run.truth.size() == 10001);
    REQUIRE(run.t.size() == run.truth.size());
    REQUIRE(run.meas.size() == run.truth.size());
    REQUIRE(run.gusts.size() == run.truth.size());
    for (const StateVector& x : run.truth) {
        CHECK(std::abs(x.p_n) < 1e-9);
        CHECK(std::abs(x.h - 10.0) < 1e-9);
        CHECK(std::abs(x.u) < 1e-9);
        CHECK(std::abs(x.w) < 1e-9);
        CHECK(std::abs(x.theta) < 1e-9);
        CHECK(std::abs(x.q) < 1e-9);
    }
    CHECK(run.meas.back()(0) == run.truth.back().p_n);
}

TEST_CASE("disturbed truth deviates and gust spread matches the configured sigma") {
    ScenarioConfig cfg = disturbed_config(5000.0);
    const TruthRun run = run_truth(cfg);

    double dev_pn = 0.0, dev_h = 0.0;
    double sum_u = 0.0, sq_u = 0.0, sum_w = 0.0, sq_w = 0.0;
    const std::size_t burn = 2000;
    const double n         = double(run.truth.size() - burn);
    for (std::size_t k = burn; k < run.truth.size(); ++k) {
        dev_pn = std::max(dev_pn, std::abs(run.truth[k].p_n));
        dev_h  = std::max(dev_h, std::abs(run.truth[k].h - 10.0));
        sum_u += run.gusts[k].u_g;
        sq_u += run.gusts[k].u_g * run.gusts[k].u_g;
        sum_w += run.gusts[k].w_g;
        sq_w += run.gusts[k].w_g * run.gusts[k].w_g;
    }
    CHECK(dev_pn > 0.0);
    CHECK(dev_h > 0.0);

    const double std_u = std::sqrt(sq_u / n - (sum_u / n) * (sum_u / n));
    const double std_w = std::sqrt(sq_w / n - (sum_w / n) * (sum_w / n));
    CHECK(std_u == doctest::Approx(7.0).epsilon(0.05));
    CHECK(std_w == doctest::Approx(4.9).epsilon(0.05));
}

TEST_CASE("measurement noise statistics match the configured std") {
    ScenarioConfig cfg = hover_config(1000.0); // 1e5 measurement draws
    cfg.meas_noise_std = Vec2(0.1, 0.1);
    const TruthRun run = run_truth(cfg);

    for (int ch = 0; ch < 2; ++ch) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t k = 0; k < run.meas.size(); ++k) {
            const double e = run.meas[k](ch) - measurement(run.truth[k])(ch);
            sum += e;
            sq += e * e;
        }
        const double n   = double(run.meas.size());
        const double std = std::sqrt(sq / n - (sum / n) * (sum / n));
        CHECK(std > 0.095);
        CHECK(std < 0.105);
    }
}

TEST_CASE("identical seeds reproduce the run bit-exactly") {
    const ScenarioConfig cfg = disturbed_config(5.0);
    const TruthRun a         = run_truth(cfg);
    const TruthRun b         = run_truth(cfg);
    for (std::size_t k = 0; k < a.truth.size(); ++k) {
        CHECK(a.truth[k].p_n == b.truth[k].p_n);
        CHECK(a.truth[k].h == b.truth[k].h);
        CHECK(a.meas[k] == b.meas[k]);
        CHECK(a.gusts[k].u_g == b.gusts[k].u_g);
    }
}

TEST_CASE("a noise-free hover run is estimated exactly by all three filters") {
    ScenarioConfig cfg = hover_config(5.0);
    std::vector<FilterSetup> setups;
    for (FilterKind kind : {FilterKind::Ekf, FilterKind::Ukf, FilterKind::Pf}) {
        FilterSetup s = default_filter_setup(kind);
        s.p0_diag.setZero();
        s.noise.q_diag.setZero();
        s.noise.r_diag << 0.01, 0.01;
        s.particles = 200;
        setups.push_back(s);
    }
    const RunResult result = run_comparison(cfg, setups);
    const Metrics metrics  = compute_metrics(result);
    REQUIRE(metrics.filters.size() == 3);
    for (const auto& fm : metrics.filters) {
        CHECK(fm.pn.rmse < 1e-6);
        CHECK(fm.h.rmse < 1e-6);
        CHECK(fm.degenerate_count == 0);
    }
}

TEST_CASE("all filters in a comparison see the same truth realization") {
    ScenarioConfig cfg     = disturbed_config(2.0);
    const RunResult result = run_comparison(
        cfg, {default_filter_setup(FilterKind::Ekf), default_filter_setup(FilterKind::Ukf)});
    REQUIRE(result.traces.size() == 2);
    CHECK(result.traces[0].est.size() == result.truth.t.size());
    CHECK(result.traces[1].est.size() == result.truth.t.size());

    // the same scenario run twice yields the same measurements for both
    const TruthRun again = run_truth(cfg);
    for (std::size_t k = 0; k < again.meas.size(); ++k)
        CHECK(again.meas[k] == result.truth.meas[k]);
}

TEST_CASE("run_comparison requires a filter selection") {
    CHECK_THROWS_AS(run_comparison(hover_config(1.0), {}), ConfigError);
}

TEST_CASE("metrics match an independent reference computation") {
    // zero error and constant offset
    RunResult r;
    r.truth.t = {0.0, 0.01, 0.02, 0.03};
    for (double t : r.truth.t) {
        StateVector x;
        x.p_n = 2.0 * t;
        x.h   = 10.0;
        r.truth.truth.push_back(x);
        r.truth.gusts.push_back(GustSample{});
        r.truth.meas.push_back(Vec2(2.0 * t, 10.0));
    }
    FilterTrace exact;
    exact.kind = FilterKind::Ekf;
    FilterTrace offset;
    offset.kind = FilterKind::Ukf;
    for (double t : r.truth.t) {
        StateVector x;
        x.p_n = 2.0 * t;
        x.h   = 10.0;
        exact.est.push_back(x);
        exact.var_pos.push_back(Vec2::Zero());
        StateVector y = x;
        y.h += 1.0;
        offset.est.push_back(y);
        offset.var_pos.push_back(Vec2::Zero());
    }
    exact.steps = offset.steps = 3;
    r.traces    = {exact, offset};

    const Metrics m = compute_metrics(r);
    CHECK(m.filters[0].pn.rmse == 0.0);
    CHECK(m.filters[0].h.rmse == 0.0);
    CHECK(m.filters[1].h.rmse == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.meas_pn.rmse == 0.0);

    // random series against a hand-rolled summation oracle
    std::mt19937_64 rng(55);
    auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53; };
    RunResult rr;
    FilterTrace tr;
    tr.kind = FilterKind::Pf;
    const int n = 1000;
    std::vector<double> truth_series(n), est_series(n);
    for (int i = 0; i < n; ++i) {
        truth_series[i] = uni();
        est_series[i]   = uni();
        rr.truth.t.push_back(0.01 * i);
        StateVector x;
        x.p_n = truth_series[i];
        rr.truth.truth.push_back(x);
        rr.truth.meas.push_back(Vec2(truth_series[i], 0.0));
        rr.truth.gusts.push_back(GustSample{});
        StateVector e;
        e.p_n = est_series[i];
        tr.est.push_back(e);
        tr.var_pos.push_back(Vec2::Zero());
    }
    tr.steps  = n - 1;
    rr.traces = {tr};

    double sq = 0.0, tv = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = est_series[i] - truth_series[i];
        sq += d * d;
    }
    for (int i = 1; i < n; ++i)
        tv += std::abs(est_series[i] - est_series[i - 1]);

    const Metrics mm = compute_metrics(rr);
    CHECK(mm.filters[0].pn.rmse == doctest::Approx(std::sqrt(sq / n)).epsilon(1e-12));
    CHECK(mm.filters[0].pn.total_variation == doctest::Approx(tv).epsilon(1e-12));
}

TEST_CASE("written outputs are deterministic and round-trip bit-exactly") {
    ScenarioConfig cfg = disturbed_config(1.0);
    const RunResult result =
        run_comparison(cfg, {default_filter_setup(FilterKind::Ekf)});
    const Metrics metrics = compute_metrics(result);

    const fs::path dir_a = fs::temp_directory_path() / "gustnav_test_out_a";
    const fs::path dir_b = fs::temp_directory_path() / "gustnav_test_out_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_outputs(result, metrics, cfg, dir_a.string());
    write_outputs(result, metrics, cfg, dir_b.string());

    for (const char* name : {"trajectory.csv", "gusts.csv", "metrics.csv", "run.json"})
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));

    // header schema
    const std::string traj = slurp(dir_a / "trajectory.csv");
    const std::string header = traj.substr(0, traj.find('\n'));
    CHECK(header ==
          "t,truth_pn,truth_h,truth_u,truth_w,truth_theta,truth_q,meas_pn,meas_h,"
          "ekf_est_pn,ekf_est_h,ekf_est_u,ekf_est_w,ekf_est_theta,ekf_est_q,ekf_var_pn,ekf_var_h");

    // parse back every truth_pn value and compare bitwise
    std::istringstream lines(traj);
    std::string line;
    std::getline(lines, line); // header
    std::size_t k = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ','); // t
        std::getline(cells, cell, ','); // truth_pn
        CHECK(std::stod(cell) == result.truth.truth[k].p_n);
        ++k;
    }
    CHECK(k == result.truth.t.size());

    CHECK(fs::exists(dir_a / "plot_results.py"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("run.json re-runs the experiment identically") {
    ScenarioConfig cfg = disturbed_config(1.0);
    const RunResult result =
        run_comparison(cfg, {default_filter_setup(FilterKind::Ekf)});
    const Metrics metrics = compute_metrics(result);

    const fs::path dir = fs::temp_directory_path() / "gustnav_test_out_c";
    fs::remove_all(dir);
    write_outputs(result, metrics, cfg, dir.string());

    const ScenarioConfig replay = load_config((dir / "run.json").string());
    const TruthRun rerun        = run_truth(replay);
    REQUIRE(rerun.t.size() == result.truth.t.size());
    for (std::size_t k = 0; k < rerun.t.size(); ++k) {
        CHECK(rerun.truth[k].p_n == result.truth.truth[k].p_n);
        CHECK(rerun.truth[k].h == result.truth.truth[k].h);
        CHECK(rerun.meas[k] == result.truth.meas[k]);
    }
    fs::remove_all(dir);
}

TEST_CASE("config validation reports the offending field") {
    ScenarioConfig cfg = hover_config(1.0);
    cfg.duration       = -1.0;
    try {
        run_truth(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("duration") != std::string::npos);
    }

    cfg          = hover_config(1.0);
    cfg.dt       = 0.0;
    CHECK_THROWS_AS(run_truth(cfg), ConfigError);

    cfg                = hover_config(1.0);
    cfg.meas_noise_std = Vec2(-0.1, 0.1);
    CHECK_THROWS_AS(run_truth(cfg), ConfigError);

    cfg              = hover_config(1.0);
    cfg.control_mode = ControlMode::Series;
    cfg.control_series.clear();
    CHECK_THROWS_AS(run_truth(cfg), ConfigError);
}

TEST_CASE("explicit control series follows the schedule") {
    ScenarioConfig cfg = hover_config(1.0);
    cfg.control_mode   = ControlMode::Series;
    cfg.control_series = {{0.0, 14.715, 0.0}, {0.5, 16.0, 0.01}};
    CHECK(cfg.control_at(0.0).thrust == 14.715);
    CHECK(cfg.control_at(0.49).thrust == 14.715);
    CHECK(cfg.control_at(0.5).thrust == 16.0);
    CHECK(cfg.control_at(0.9).pitch_torque == 0.01);

    const TruthRun run = run_truth(cfg);
    // thrust above trim from 0.5 s on pushes the vehicle up
    CHECK(run.truth.back().h > 10.0);
}

TEST_CASE("json config parsing applies defaults and rejects bad fields") {
    const ScenarioConfig cfg = config_from_json_text(R"({
        "duration": 2.5,
        "seed": 7,
        "turbulence": {"enabled": true, "conditions": {"altitude": 10, "wind_speed": 70}},
        "filters": {"ekf": {"enabled": true}, "pf": {"enabled": true, "particles": 123}}
    })");
    CHECK(cfg.duration == 2.5);
    CHECK(cfg.seed == 7);
    CHECK(cfg.dt == 0.01);
    REQUIRE(cfg.filters.size() == 2);
    CHECK(cfg.filters[0].kind == FilterKind::Ekf);
    CHECK(cfg.filters[1].kind == FilterKind::Pf);
    CHECK(cfg.filters[1].particles == 123);
    CHECK(cfg.turbulence.resolve().longitudinal.sigma == doctest::Approx(7.0));

    CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"duration": -3})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"control": {"mode": "warp"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"filters": {"ekf": {"q_diag": [1, 2]}}})"),
                    ConfigError);

    const std::string round = config_to_json_text(cfg);
    const ScenarioConfig back = config_from_json_text(round);
    CHECK(back.duration == cfg.duration);
    CHECK(back.seed == cfg.seed);
    CHECK(back.filters.size() == cfg.filters.size());
    CHECK(back.turbulence.resolve().vertical.omega_n ==
          doctest::Approx(cfg.turbulence.resolve().vertical.omega_n));
}
