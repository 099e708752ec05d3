#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gustnav/harness.hpp"
#include "gustnav/tuner.hpp"

namespace {

using namespace gustnav;

struct Overrides {
    std::string scenario;
    std::uint64_t seed = 0;
    bool seed_set      = false;
    double dt          = 0.0;
    double duration    = 0.0;
};

void apply_overrides(ScenarioConfig& cfg, const Overrides& o) {
    if (o.scenario == "hover") {
        cfg.turbulence.enabled = false;
    } else if (o.scenario == "disturbed") {
        cfg.turbulence.enabled    = true;
        cfg.turbulence.axes.reset();
        cfg.turbulence.conditions = TurbulenceConditions{10.0, 70.0};
    } else if (!o.scenario.empty()) {
        throw ConfigError("--scenario: expected 'hover' or 'disturbed'");
    }
    if (o.seed_set)
        cfg.seed = o.seed;
    if (o.dt > 0.0)
        cfg.dt = o.dt;
    if (o.duration > 0.0)
        cfg.duration = o.duration;
    cfg.validate();
}

std::vector<FilterSetup> select_filters(const ScenarioConfig& cfg, const std::string& names) {
    std::vector<FilterSetup> out;
    if (names.empty()) {
        for (const auto& f : cfg.filters)
            if (f.enabled)
                out.push_back(f);
        if (out.empty())
            throw ConfigError("filters: no filter enabled in the config");
        return out;
    }
    std::stringstream ss(names);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        FilterKind kind;
        if (tok == "ekf")
            kind = FilterKind::Ekf;
        else if (tok == "ukf")
            kind = FilterKind::Ukf;
        else if (tok == "pf")
            kind = FilterKind::Pf;
        else
            throw ConfigError("--filters: unknown filter '" + tok + "' (expected ekf|ukf|pf)");
        bool found = false;
        for (const auto& f : cfg.filters)
            if (f.kind == kind && !found) {
                out.push_back(f);
                found = true;
            }
        if (!found)
            out.push_back(default_filter_setup(kind));
    }
    if (out.empty())
        throw ConfigError("--filters: at least one filter must be selected");
    return out;
}

void print_metrics(const Metrics& m) {
    std::printf("%-8s %-12s %-12s %-12s %-12s %-12s\n", "series", "rmse_pn", "rmse_h", "tv_pn",
                "tv_h", "step_wall_s");
    auto row = [](const char* name, double r1, double r2, double t1, double t2, double wall) {
        std::printf("%-8s %-12.6g %-12.6g %-12.6g %-12.6g %-12.4g\n", name, r1, r2, t1, t2, wall);
    };
    row("meas", m.meas_pn.rmse, m.meas_h.rmse, m.meas_pn.total_variation,
        m.meas_h.total_variation, 0.0);
    for (const auto& f : m.filters)
        row(filter_name(f.kind), f.pn.rmse, f.h.rmse, f.pn.total_variation, f.h.total_variation,
            f.mean_step_seconds);
}

int run_simulation(const std::string& config_path, const Overrides& o, const std::string& filters,
                   const std::string& out_dir) {
    ScenarioConfig cfg = load_config(config_path);
    apply_overrides(cfg, o);
    const RunResult result = run_comparison(cfg, select_filters(cfg, filters));
    const Metrics metrics  = compute_metrics(result);
    write_outputs(result, metrics, cfg, out_dir);
    print_metrics(metrics);
    std::cout << "outputs written to " << out_dir << "\n";
    return 0;
}

int run_tuning(const std::string& config_path, const Overrides& o, const std::string& filter_arg,
               const std::string& cost_arg, const std::string& out_dir) {
    ScenarioConfig cfg = load_config(config_path);
    apply_overrides(cfg, o);

    FilterKind kind;
    if (filter_arg == "ekf")
        kind = FilterKind::Ekf;
    else if (filter_arg == "ukf")
        kind = FilterKind::Ukf;
    else
        throw ConfigError("--filter: expected 'ekf' or 'ukf'");

    CostSpec cost = cfg.tuning.cost;
    if (cost_arg == "ls")
        cost.variant = CostSpec::Variant::LeastSquares;
    else if (cost_arg == "smooth")
        cost.variant = CostSpec::Variant::Smooth;
    else
        throw ConfigError("--cost: expected 'ls' or 'smooth'");

    const TuneResult result = tune_filter(cfg, kind, cost, cfg.tuning.ga);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

    nlohmann::json tuned;
    tuned["filter"]        = filter_name(kind);
    tuned["cost_variant"]  = cost.variant == CostSpec::Variant::LeastSquares ? "ls" : "smooth";
    tuned["best_cost"]     = result.best_cost;
    tuned["baseline_cost"] = result.baseline_cost;
    tuned["generations"]   = result.generations;
    tuned["q_diag"]        = std::vector<double>(result.noise.q_diag.data(),
                                                 result.noise.q_diag.data() + 6);
    tuned["r_diag"]        = std::vector<double>{result.noise.r_diag(0), result.noise.r_diag(1)};
    if (result.ukf) {
        tuned["alpha"] = result.ukf->alpha;
        tuned["beta"]  = result.ukf->beta;
        tuned["kappa"] = result.ukf->kappa;
    }
    {
        std::ofstream out(fs::path(out_dir) / "tuned.json");
        if (!out)
            throw IoError("cannot write '" + out_dir + "/tuned.json'");
        out << tuned.dump(2) << "\n";
    }
    {
        std::ofstream hist(fs::path(out_dir) / "cost_history.csv");
        if (!hist)
            throw IoError("cannot write '" + out_dir + "/cost_history.csv'");
        hist << "generation,best_cost\n";
        for (std::size_t i = 0; i < result.history.size(); ++i)
            hist << i << ',' << result.history[i] << '\n';
    }

    std::cout << "tuned " << filter_name(kind) << ": best cost " << result.best_cost
              << " (baseline " << result.baseline_cost << ") after " << result.generations
              << " generations; results in " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gustnav — quadrotor position estimation under gust disturbances"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string filters;
    std::string filter_arg;
    std::string cost_arg = "ls";
    Overrides overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config JSON")->required();
        cmd->add_option("--seed", overrides.seed, "master seed override")
            ->each([&](const std::string&) { overrides.seed_set = true; });
        cmd->add_option("--dt", overrides.dt, "time step override [s]");
        cmd->add_option("--duration", overrides.duration, "duration override [s]");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the scenario with selected filters");
    add_common(sim);
    sim->add_option("--scenario", overrides.scenario, "preset: hover|disturbed");
    sim->add_option("--filters", filters, "comma list: ekf,ukf,pf");

    CLI::App* tune = app.add_subcommand("tune", "GA-tune a filter's noise parameters");
    add_common(tune);
    tune->add_option("--filter", filter_arg, "ekf|ukf")->required();
    tune->add_option("--cost", cost_arg, "ls|smooth");

    CLI::App* cmp = app.add_subcommand("compare", "run EKF, UKF, and PF on one realization");
    add_common(cmp);
    cmp->add_option("--scenario", overrides.scenario, "preset: hover|disturbed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulation(config_path, overrides, filters, out_dir);
        if (cmp->parsed())
            return run_simulation(config_path, overrides, "ekf,ukf,pf", out_dir);
        return run_tuning(config_path, overrides, filter_arg, cost_arg, out_dir);
    } catch (const gustnav::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
}
