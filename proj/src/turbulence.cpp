#include "gustnav/turbulence.hpp"

#include <cmath>
#include <string>

namespace gustnav {

void AxisParams::validate(const char* axis) const {
    if (!(zeta > 0.0) || !std::isfinite(zeta))
        throw ConfigError(std::string("turbulence ") + axis + ": zeta must be finite and > 0");
    if (!(omega_n > 0.0) || !std::isfinite(omega_n))
        throw ConfigError(std::string("turbulence ") + axis + ": omega_n must be finite and > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError(std::string("turbulence ") + axis + ": sigma must be finite and >= 0");
}

AxisState axis_step(const AxisState& s, const AxisParams& p, double n, double dt,
                    const char* axis) {
    p.validate(axis);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InputError("axis_step: dt must be finite and > 0");
    if (!(dt * p.omega_n < 0.5))
        throw ConfigError(std::string("turbulence ") + axis + ": dt*omega_n = " +
                          std::to_string(dt * p.omega_n) + " violates the stability guard (< 0.5)");
    if (!std::isfinite(n))
        throw InputError("axis_step: noise sample must be finite");

    // input scale calibrated so the stationary std of g is sigma
    const double k     = 2.0 * p.sigma * std::sqrt(p.zeta * p.omega_n * p.omega_n * p.omega_n);
    const double force = k * n / std::sqrt(dt);
    const double a     = 2.0 * p.zeta * p.omega_n;
    const double b     = p.omega_n * p.omega_n;

    auto deriv = [&](double g, double gd) { return std::pair{gd, force - a * gd - b * g}; };

    const auto [k1g, k1v] = deriv(s.g, s.g_dot);
    const auto [k2g, k2v] = deriv(s.g + 0.5 * dt * k1g, s.g_dot + 0.5 * dt * k1v);
    const auto [k3g, k3v] = deriv(s.g + 0.5 * dt * k2g, s.g_dot + 0.5 * dt * k2v);
    const auto [k4g, k4v] = deriv(s.g + dt * k3g, s.g_dot + dt * k3v);

    AxisState out;
    out.g     = s.g + dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    out.g_dot = s.g_dot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    return out;
}

GustSample sample_gust(const TurbulenceState& state, const AxisSelection& axes) {
    GustSample g;
    g.u_g = axes.longitudinal ? state.longitudinal.g : 0.0;
    g.w_g = axes.vertical ? state.vertical.g : 0.0;
    return g;
}

TurbulenceAxes params_from_conditions(double altitude, double wind_speed) {
    if (!(altitude > 0.0) || !std::isfinite(altitude))
        throw ConfigError("turbulence.conditions.altitude: must be finite and > 0");
    if (!(wind_speed >= 0.0) || !std::isfinite(wind_speed))
        throw ConfigError("turbulence.conditions.wind_speed: must be finite and >= 0");

    const double sigma_u = 0.1 * wind_speed;
    const double alt_ft  = altitude / 0.3048;
    const double len_u   = altitude / std::pow(0.177 + 0.000823 * alt_ft, 1.2);
    const double len_w   = altitude;

    // omega_n = V/L; frequency is inert at zero intensity, keep it valid
    const double om_u = wind_speed > 0.0 ? wind_speed / len_u : 1.0;
    const double om_w = wind_speed > 0.0 ? wind_speed / len_w : 1.0;

    TurbulenceAxes axes;
    axes.longitudinal = AxisParams{0.7, om_u, sigma_u};
    axes.lateral      = AxisParams{0.7, om_u, sigma_u};
    axes.vertical     = AxisParams{0.7, om_w, 0.7 * sigma_u};
    return axes;
}

VonKarmanGenerator::VonKarmanGenerator(const TurbulenceAxes& axes, const AxisSelection& enabled,
                                       std::uint64_t seed)
    : axes_(axes),
      enabled_(enabled),
      stream_u_(sub_seed(seed, Stream::TurbulenceU)),
      stream_v_(sub_seed(seed, Stream::TurbulenceV)),
      stream_w_(sub_seed(seed, Stream::TurbulenceW)) {
    axes_.longitudinal.validate("u");
    axes_.lateral.validate("v");
    axes_.vertical.validate("w");
}

const TurbulenceState& VonKarmanGenerator::step(double dt) {
    if (enabled_.longitudinal)
        state_.longitudinal = axis_step(state_.longitudinal, axes_.longitudinal,
                                        stream_u_.normal(), dt, "u");
    if (enabled_.lateral)
        state_.lateral = axis_step(state_.lateral, axes_.lateral, stream_v_.normal(), dt, "v");
    if (enabled_.vertical)
        state_.vertical = axis_step(state_.vertical, axes_.vertical, stream_w_.normal(), dt, "w");
    return state_;
}

} // namespace gustnav
