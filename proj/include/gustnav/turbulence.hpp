#pragma once

#include <cstdint>

#include "gustnav/rng.hpp"
#include "gustnav/types.hpp"

namespace gustnav {

/// Shaping-filter parameters for one gust axis.
struct AxisParams {
    double zeta    = 0.7; ///< damping ratio
    double omega_n = 1.0; ///< natural frequency [rad/s]
    double sigma   = 0.0; ///< target stationary std of the gust output [m/s]

    void validate(const char* axis = "axis") const;
};

/// Second-order filter state for one axis: gust velocity and its rate.
struct AxisState {
    double g     = 0.0; ///< gust velocity [m/s]
    double g_dot = 0.0; ///< gust velocity rate [m/s^2]
};

/// All three axes; lateral is carried for completeness but no shipped scenario
/// maps it into the planar dynamics.
struct TurbulenceState {
    AxisState longitudinal;
    AxisState lateral;
    AxisState vertical;
};

struct AxisSelection {
    bool longitudinal = true;
    bool lateral      = false;
    bool vertical     = true;
};

struct TurbulenceAxes {
    AxisParams longitudinal;
    AxisParams lateral;
    AxisParams vertical;
};

/// Advance one axis of the gust filter by one RK4 step of
///   g'' + 2*zeta*omega_n*g' + omega_n^2*g = k * n / sqrt(dt),
/// with the white-noise sample n held constant over the step. The input scale
/// k = 2*sigma*sqrt(zeta*omega_n^3) makes the continuous-time stationary std
/// of g equal sigma.
///
/// Requires dt*omega_n < 0.5 (accuracy guard for the explicit discretization);
/// violation raises a ConfigError naming `axis`.
AxisState axis_step(const AxisState& s, const AxisParams& p, double n, double dt,
                    const char* axis = "axis");

/// Project enabled axes into the planar gust sample; disabled axes contribute 0.
GustSample sample_gust(const TurbulenceState& state, const AxisSelection& axes);

/// Map flight conditions to per-axis filter parameters (low-altitude
/// military-handbook style relations):
///   sigma_u = 0.1 * wind_speed, sigma_w = 0.7 * sigma_u, sigma_v = sigma_u
///   L_w = altitude, L_u = L_v = altitude / (0.177 + 0.000823*alt_ft)^1.2
///   omega_n = wind_speed / L per axis (1.0 rad/s when wind_speed = 0)
///   zeta = 0.7 everywhere
/// Altitude in meters, wind speed in m/s.
TurbulenceAxes params_from_conditions(double altitude, double wind_speed);

/// Seedable Von Karman gust generator: one shaping filter per axis, each driven
/// by its own normal stream. A value type with explicit state; one instance per
/// simulation run.
class VonKarmanGenerator {
public:
    VonKarmanGenerator(const TurbulenceAxes& axes, const AxisSelection& enabled,
                       std::uint64_t seed);

    /// Advance every enabled axis by dt and return the new state.
    const TurbulenceState& step(double dt);

    const TurbulenceState& state() const { return state_; }

    /// Gust sample of the current state under the enabled-axis selection.
    GustSample gust() const { return sample_gust(state_, enabled_); }

private:
    TurbulenceAxes axes_;
    AxisSelection enabled_;
    TurbulenceState state_;
    RandomStream stream_u_;
    RandomStream stream_v_;
    RandomStream stream_w_;
};

} // namespace gustnav
