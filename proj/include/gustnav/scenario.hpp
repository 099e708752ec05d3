#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gustnav/cost.hpp"
#include "gustnav/filters.hpp"
#include "gustnav/ga.hpp"
#include "gustnav/turbulence.hpp"
#include "gustnav/types.hpp"

namespace gustnav {

enum class ControlMode { HoverTrim, Series };

/// Piecewise-constant control schedule entry: applies from time t onward.
struct ControlPoint {
    double t      = 0.0;
    double thrust = 0.0;
    double torque = 0.0;
};

struct TurbulenceConditions {
    double altitude   = 10.0; ///< [m]
    double wind_speed = 70.0; ///< [m/s]
};

struct TurbulenceConfig {
    bool enabled = false;
    TurbulenceConditions conditions;
    std::optional<TurbulenceAxes> axes; ///< explicit override of the condition mapping
    AxisSelection active;               ///< default: longitudinal + vertical

    TurbulenceAxes resolve() const {
        return axes ? *axes : params_from_conditions(conditions.altitude, conditions.wind_speed);
    }
};

/// Per-filter configuration; fields irrelevant to a kind are ignored.
struct FilterSetup {
    FilterKind kind = FilterKind::Ekf;
    bool enabled    = true;
    NoiseConfig noise;
    UkfParams ukf;
    int particles = kBaselinePfParticles;
    Vec6 p0_diag  = Vec6::Constant(0.01);
};

FilterSetup default_filter_setup(FilterKind kind);

struct TuningConfig {
    GaConfig ga;
    CostSpec cost;
    double horizon = 10.0; ///< evaluation duration per genome [s]; <= 0 keeps scenario duration
};

struct ScenarioConfig {
    double duration    = 100.0;
    double dt          = 0.01;
    std::uint64_t seed = 20250809;
    QuadrotorParams quad;
    StateVector initial{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    ControlMode control_mode = ControlMode::HoverTrim;
    std::vector<ControlPoint> control_series;
    TurbulenceConfig turbulence;
    Vec2 meas_noise_std = Vec2(0.1, 0.1);
    std::vector<FilterSetup> filters;
    TuningConfig tuning;

    void validate() const;
    ControlInput control_at(double t) const;
    std::size_t step_count() const; ///< duration/dt, rounded; series have step_count()+1 samples

    /// Hover scenario with the three baseline filters configured.
    static ScenarioConfig defaults();
};

/// Parse a config from JSON text. Accepts either the bare schema or a document
/// with a top-level "config" object (a previously written run.json).
ScenarioConfig config_from_json_text(const std::string& text);

/// Load from a file path.
ScenarioConfig load_config(const std::string& path);

/// Serialize the fully resolved config (turbulence axes expanded, every filter
/// block explicit). Parsing the result reproduces the scenario exactly.
std::string config_to_json_text(const ScenarioConfig& cfg);

} // namespace gustnav
