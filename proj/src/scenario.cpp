#include "gustnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gustnav {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(ctx + "." + key + ": required number missing or wrong type");
    return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& ctx) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError(ctx + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

bool bool_or(const json& j, const std::string& key, bool fallback, const std::string& ctx) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_boolean())
        throw ConfigError(ctx + "." + key + ": expected a boolean");
    return j.at(key).get<bool>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_or(const json& j, const std::string& key,
                                      const Eigen::Matrix<double, N, 1>& fallback,
                                      const std::string& ctx) {
    if (!j.contains(key))
        return fallback;
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != N)
        throw ConfigError(ctx + "." + key + ": expected an array of " + std::to_string(N) +
                          " numbers");
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
        if (!arr[i].is_number())
            throw ConfigError(ctx + "." + key + ": expected numeric entries");
        out(i) = arr[i].get<double>();
    }
    return out;
}

AxisParams axis_from_json(const json& j, const std::string& ctx) {
    AxisParams p;
    p.zeta    = require_number(j, "zeta", ctx);
    p.omega_n = require_number(j, "omega_n", ctx);
    p.sigma   = require_number(j, "sigma", ctx);
    return p;
}

json axis_to_json(const AxisParams& p) {
    return json{{"zeta", p.zeta}, {"omega_n", p.omega_n}, {"sigma", p.sigma}};
}

FilterKind kind_from_name(const std::string& name) {
    if (name == "ekf")
        return FilterKind::Ekf;
    if (name == "ukf")
        return FilterKind::Ukf;
    if (name == "pf")
        return FilterKind::Pf;
    throw ConfigError("filters: unknown filter '" + name + "' (expected ekf|ukf|pf)");
}

template <int N>
json to_array(const Eigen::Matrix<double, N, 1>& v) {
    json a = json::array();
    for (int i = 0; i < N; ++i)
        a.push_back(v(i));
    return a;
}

} // namespace

FilterSetup default_filter_setup(FilterKind kind) {
    FilterSetup s;
    s.kind = kind;
    switch (kind) {
    case FilterKind::Ekf:
        s.noise = baseline_ekf_noise();
        break;
    case FilterKind::Ukf:
        s.noise = baseline_ukf_noise();
        s.ukf   = baseline_ukf_params();
        break;
    case FilterKind::Pf:
        s.noise     = baseline_pf_noise();
        s.particles = kBaselinePfParticles;
        break;
    }
    return s;
}

void ScenarioConfig::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ConfigError("duration: must be finite and > 0");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("dt: must be finite and > 0");
    quad.validate();
    if (!initial.is_finite())
        throw ConfigError("initial_state: must be finite");
    if (!meas_noise_std.allFinite() || (meas_noise_std.array() < 0.0).any())
        throw ConfigError("measurement_noise_std: entries must be finite and >= 0");
    if (control_mode == ControlMode::Series) {
        if (control_series.empty())
            throw ConfigError("control.points: series mode requires at least one point");
        for (std::size_t i = 1; i < control_series.size(); ++i)
            if (control_series[i].t < control_series[i - 1].t)
                throw ConfigError("control.points: times must be non-decreasing");
    }
    if (turbulence.enabled) {
        const TurbulenceAxes axes = turbulence.resolve();
        axes.longitudinal.validate("u");
        axes.lateral.validate("v");
        axes.vertical.validate("w");
        const double max_om = std::max({axes.longitudinal.omega_n, axes.lateral.omega_n,
                                        axes.vertical.omega_n});
        if (!(dt * max_om < 0.5))
            throw ConfigError("turbulence: dt*omega_n must stay below 0.5 for every axis");
    }
    for (const auto& f : filters) {
        f.noise.validate();
        if (f.kind == FilterKind::Ukf)
            f.ukf.validate();
        if (f.kind == FilterKind::Pf && f.particles < 1)
            throw ConfigError("filters.pf.particles: must be >= 1");
        if (!f.p0_diag.allFinite() || (f.p0_diag.array() < 0.0).any())
            throw ConfigError("filters.p0_diag: entries must be finite and >= 0");
    }
}

ControlInput ScenarioConfig::control_at(double t) const {
    if (control_mode == ControlMode::HoverTrim)
        return ControlInput{quad.mass * quad.gravity, 0.0};
    // last schedule point with time <= t; before the first point, the first applies
    const ControlPoint* active = &control_series.front();
    for (const auto& p : control_series) {
        if (p.t <= t)
            active = &p;
        else
            break;
    }
    return ControlInput{active->thrust, active->torque};
}

std::size_t ScenarioConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig cfg;
    cfg.filters = {default_filter_setup(FilterKind::Ekf), default_filter_setup(FilterKind::Ukf),
                   default_filter_setup(FilterKind::Pf)};
    return cfg;
}

ScenarioConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (j.contains("config")) // run.json echo
        j = j.at("config");
    if (!j.is_object())
        throw ConfigError("config: top-level JSON object expected");

    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.duration       = number_or(j, "duration", cfg.duration, "config");
    cfg.dt             = number_or(j, "dt", cfg.dt, "config");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw ConfigError("config.seed: expected an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("quad")) {
        const auto& q     = j.at("quad");
        cfg.quad.mass      = number_or(q, "mass", cfg.quad.mass, "quad");
        cfg.quad.gravity   = number_or(q, "gravity", cfg.quad.gravity, "quad");
        cfg.quad.inertia_y = number_or(q, "inertia_y", cfg.quad.inertia_y, "quad");
    }

    if (j.contains("initial_state")) {
        const auto& s     = j.at("initial_state");
        cfg.initial.p_n   = number_or(s, "p_n", cfg.initial.p_n, "initial_state");
        cfg.initial.h     = number_or(s, "h", cfg.initial.h, "initial_state");
        cfg.initial.u     = number_or(s, "u", cfg.initial.u, "initial_state");
        cfg.initial.w     = number_or(s, "w", cfg.initial.w, "initial_state");
        cfg.initial.theta = number_or(s, "theta", cfg.initial.theta, "initial_state");
        cfg.initial.q     = number_or(s, "q", cfg.initial.q, "initial_state");
    }

    if (j.contains("control")) {
        const auto& c = j.at("control");
        const std::string mode = c.contains("mode") ? c.at("mode").get<std::string>() : "hover-trim";
        if (mode == "hover-trim") {
            cfg.control_mode = ControlMode::HoverTrim;
        } else if (mode == "series") {
            cfg.control_mode = ControlMode::Series;
            if (!c.contains("points") || !c.at("points").is_array())
                throw ConfigError("control.points: required array for series mode");
            cfg.control_series.clear();
            for (const auto& p : c.at("points")) {
                ControlPoint pt;
                pt.t      = require_number(p, "t", "control.points[]");
                pt.thrust = require_number(p, "thrust", "control.points[]");
                pt.torque = number_or(p, "torque", 0.0, "control.points[]");
                cfg.control_series.push_back(pt);
            }
        } else {
            throw ConfigError("control.mode: expected 'hover-trim' or 'series'");
        }
    }

    if (j.contains("turbulence")) {
        const auto& t          = j.at("turbulence");
        cfg.turbulence.enabled = bool_or(t, "enabled", cfg.turbulence.enabled, "turbulence");
        if (t.contains("conditions")) {
            const auto& c = t.at("conditions");
            cfg.turbulence.conditions.altitude =
                number_or(c, "altitude", cfg.turbulence.conditions.altitude, "turbulence.conditions");
            cfg.turbulence.conditions.wind_speed =
                number_or(c, "wind_speed", cfg.turbulence.conditions.wind_speed,
                          "turbulence.conditions");
        }
        if (t.contains("axes")) {
            const auto& a = t.at("axes");
            TurbulenceAxes axes;
            axes.longitudinal = axis_from_json(a.at("longitudinal"), "turbulence.axes.longitudinal");
            axes.lateral      = axis_from_json(a.at("lateral"), "turbulence.axes.lateral");
            axes.vertical     = axis_from_json(a.at("vertical"), "turbulence.axes.vertical");
            cfg.turbulence.axes = axes;
        }
        if (t.contains("active")) {
            const auto& act = t.at("active");
            if (!act.is_array())
                throw ConfigError("turbulence.active: expected an array of axis names");
            cfg.turbulence.active = AxisSelection{false, false, false};
            for (const auto& name : act) {
                const std::string s = name.get<std::string>();
                if (s == "longitudinal")
                    cfg.turbulence.active.longitudinal = true;
                else if (s == "lateral")
                    cfg.turbulence.active.lateral = true;
                else if (s == "vertical")
                    cfg.turbulence.active.vertical = true;
                else
                    throw ConfigError("turbulence.active: unknown axis '" + s + "'");
            }
        }
    }

    cfg.meas_noise_std = vector_or<2>(j, "measurement_noise_std", cfg.meas_noise_std, "config");

    if (j.contains("filters")) {
        const auto& fs = j.at("filters");
        if (!fs.is_object())
            throw ConfigError("filters: expected an object keyed by filter name");
        std::vector<FilterSetup> setups;
        for (const std::string name : {"ekf", "ukf", "pf"}) {
            if (!fs.contains(name))
                continue;
            const auto& f    = fs.at(name);
            FilterSetup s    = default_filter_setup(kind_from_name(name));
            s.enabled        = bool_or(f, "enabled", true, "filters." + name);
            s.noise.q_diag   = vector_or<6>(f, "q_diag", s.noise.q_diag, "filters." + name);
            s.noise.r_diag   = vector_or<2>(f, "r_diag", s.noise.r_diag, "filters." + name);
            s.p0_diag        = vector_or<6>(f, "p0_diag", s.p0_diag, "filters." + name);
            if (s.kind == FilterKind::Ukf) {
                s.ukf.alpha = number_or(f, "alpha", s.ukf.alpha, "filters.ukf");
                s.ukf.beta  = number_or(f, "beta", s.ukf.beta, "filters.ukf");
                s.ukf.kappa = number_or(f, "kappa", s.ukf.kappa, "filters.ukf");
            }
            if (s.kind == FilterKind::Pf)
                s.particles = int(number_or(f, "particles", double(s.particles), "filters.pf"));
            setups.push_back(s);
        }
        cfg.filters = setups;
    }

    if (j.contains("tuning")) {
        const auto& t           = j.at("tuning");
        auto& ga                = cfg.tuning.ga;
        ga.population           = int(number_or(t, "population", double(ga.population), "tuning"));
        ga.max_generations      = int(number_or(t, "max_generations", double(ga.max_generations), "tuning"));
        ga.mutation_rate        = number_or(t, "mutation_rate", ga.mutation_rate, "tuning");
        ga.crossover_prob       = number_or(t, "crossover_prob", ga.crossover_prob, "tuning");
        ga.stop_tol             = number_or(t, "stop_tol", ga.stop_tol, "tuning");
        ga.elitism              = int(number_or(t, "elitism", double(ga.elitism), "tuning"));
        ga.stall_generations    = int(number_or(t, "stall_generations", double(ga.stall_generations), "tuning"));
        cfg.tuning.horizon      = number_or(t, "horizon", cfg.tuning.horizon, "tuning");
        if (t.contains("seed"))
            ga.seed = t.at("seed").get<std::uint64_t>();
        else
            ga.seed = sub_seed(cfg.seed, Stream::Ga);
        if (t.contains("cost")) {
            const auto& c = t.at("cost");
            const std::string variant = c.contains("variant") ? c.at("variant").get<std::string>() : "ls";
            if (variant == "ls")
                cfg.tuning.cost.variant = CostSpec::Variant::LeastSquares;
            else if (variant == "smooth")
                cfg.tuning.cost.variant = CostSpec::Variant::Smooth;
            else
                throw ConfigError("tuning.cost.variant: expected 'ls' or 'smooth'");
            cfg.tuning.cost.beta1  = number_or(c, "beta1", cfg.tuning.cost.beta1, "tuning.cost");
            cfg.tuning.cost.beta2  = number_or(c, "beta2", cfg.tuning.cost.beta2, "tuning.cost");
            cfg.tuning.cost.alpha1 = number_or(c, "alpha1", cfg.tuning.cost.alpha1, "tuning.cost");
            cfg.tuning.cost.alpha2 = number_or(c, "alpha2", cfg.tuning.cost.alpha2, "tuning.cost");
        }
    } else {
        cfg.tuning.ga.seed = sub_seed(cfg.seed, Stream::Ga);
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
    json j;
    j["duration"] = cfg.duration;
    j["dt"]       = cfg.dt;
    j["seed"]     = cfg.seed;
    j["quad"] = {{"mass", cfg.quad.mass},
                 {"gravity", cfg.quad.gravity},
                 {"inertia_y", cfg.quad.inertia_y}};
    j["initial_state"] = {{"p_n", cfg.initial.p_n}, {"h", cfg.initial.h},
                          {"u", cfg.initial.u},     {"w", cfg.initial.w},
                          {"theta", cfg.initial.theta}, {"q", cfg.initial.q}};

    if (cfg.control_mode == ControlMode::HoverTrim) {
        j["control"] = {{"mode", "hover-trim"}};
    } else {
        json pts = json::array();
        for (const auto& p : cfg.control_series)
            pts.push_back({{"t", p.t}, {"thrust", p.thrust}, {"torque", p.torque}});
        j["control"] = {{"mode", "series"}, {"points", pts}};
    }

    {
        json t;
        t["enabled"]    = cfg.turbulence.enabled;
        t["conditions"] = {{"altitude", cfg.turbulence.conditions.altitude},
                           {"wind_speed", cfg.turbulence.conditions.wind_speed}};
        const TurbulenceAxes axes = cfg.turbulence.resolve();
        t["axes"] = {{"longitudinal", axis_to_json(axes.longitudinal)},
                     {"lateral", axis_to_json(axes.lateral)},
                     {"vertical", axis_to_json(axes.vertical)}};
        json act = json::array();
        if (cfg.turbulence.active.longitudinal)
            act.push_back("longitudinal");
        if (cfg.turbulence.active.lateral)
            act.push_back("lateral");
        if (cfg.turbulence.active.vertical)
            act.push_back("vertical");
        t["active"]     = act;
        j["turbulence"] = t;
    }

    j["measurement_noise_std"] = to_array<2>(cfg.meas_noise_std);

    json fs = json::object();
    for (const auto& f : cfg.filters) {
        json e;
        e["enabled"] = f.enabled;
        e["q_diag"]  = to_array<6>(f.noise.q_diag);
        e["r_diag"]  = to_array<2>(f.noise.r_diag);
        e["p0_diag"] = to_array<6>(f.p0_diag);
        if (f.kind == FilterKind::Ukf) {
            e["alpha"] = f.ukf.alpha;
            e["beta"]  = f.ukf.beta;
            e["kappa"] = f.ukf.kappa;
        }
        if (f.kind == FilterKind::Pf)
            e["particles"] = f.particles;
        fs[filter_name(f.kind)] = e;
    }
    j["filters"] = fs;

    j["tuning"] = {{"population", cfg.tuning.ga.population},
                   {"max_generations", cfg.tuning.ga.max_generations},
                   {"mutation_rate", cfg.tuning.ga.mutation_rate},
                   {"crossover_prob", cfg.tuning.ga.crossover_prob},
                   {"stop_tol", cfg.tuning.ga.stop_tol},
                   {"elitism", cfg.tuning.ga.elitism},
                   {"stall_generations", cfg.tuning.ga.stall_generations},
                   {"seed", cfg.tuning.ga.seed},
                   {"horizon", cfg.tuning.horizon},
                   {"cost",
                    {{"variant", cfg.tuning.cost.variant == CostSpec::Variant::LeastSquares
                                     ? "ls"
                                     : "smooth"},
                     {"beta1", cfg.tuning.cost.beta1},
                     {"beta2", cfg.tuning.cost.beta2},
                     {"alpha1", cfg.tuning.cost.alpha1},
                     {"alpha2", cfg.tuning.cost.alpha2}}}};

    return j.dump(2);
}

} // namespace gustnav
