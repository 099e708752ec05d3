#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "gustnav/errors.hpp"

namespace gustnav {

using Vec2  = Eigen::Vector2d;
using Vec6  = Eigen::Matrix<double, 6, 1>;
using Mat2  = Eigen::Matrix2d;
using Mat6  = Eigen::Matrix<double, 6, 6>;
using Mat26 = Eigen::Matrix<double, 2, 6>;
using Mat62 = Eigen::Matrix<double, 6, 2>;

/// Planar (longitudinal) quadrotor state: forward/vertical translation plus pitch.
struct StateVector {
    double p_n   = 0.0; ///< northward position [m]
    double h     = 0.0; ///< altitude [m]
    double u     = 0.0; ///< forward body velocity [m/s]
    double w     = 0.0; ///< vertical body velocity [m/s]
    double theta = 0.0; ///< pitch angle [rad], kept in (-pi, pi]
    double q     = 0.0; ///< pitch rate [rad/s]

    Vec6 as_vector() const {
        Vec6 v;
        v << p_n, h, u, w, theta, q;
        return v;
    }

    static StateVector from_vector(const Vec6& v) {
        return StateVector{v(0), v(1), v(2), v(3), v(4), v(5)};
    }

    bool is_finite() const {
        return std::isfinite(p_n) && std::isfinite(h) && std::isfinite(u) &&
               std::isfinite(w) && std::isfinite(theta) && std::isfinite(q);
    }
};

/// Collective thrust and pitch torque.
struct ControlInput {
    double thrust       = 0.0; ///< total thrust F [N], >= 0
    double pitch_torque = 0.0; ///< torque about the pitch axis [N*m]

    bool is_finite() const { return std::isfinite(thrust) && std::isfinite(pitch_torque); }
};

struct QuadrotorParams {
    double mass      = 1.5;   ///< [kg]
    double gravity   = 9.81;  ///< [m/s^2]
    double inertia_y = 0.057; ///< pitch-axis moment of inertia [kg*m^2]

    void validate() const {
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw ConfigError("quad.mass: must be finite and > 0");
        if (!(gravity > 0.0) || !std::isfinite(gravity))
            throw ConfigError("quad.gravity: must be finite and > 0");
        if (!(inertia_y > 0.0) || !std::isfinite(inertia_y))
            throw ConfigError("quad.inertia_y: must be finite and > 0");
    }
};

/// Wind gust velocities seen by the vehicle, body-axis aligned.
struct GustSample {
    double u_g = 0.0; ///< longitudinal gust [m/s]
    double w_g = 0.0; ///< vertical gust [m/s]

    bool is_finite() const { return std::isfinite(u_g) && std::isfinite(w_g); }
};

} // namespace gustnav
