#pragma once

#include "gustnav/types.hpp"

namespace gustnav {

/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

/// Continuous-time state derivative of the longitudinal quadrotor model.
///
/// Gusts advect the vehicle: they add to the body velocities inside the
/// position kinematics only (ground velocity = air-relative velocity + gust).
/// Thrust enters the vertical channel, so F = m*g with level pitch is an exact
/// hover equilibrium.
///
///   p_n' = (u + u_g) cos(theta) + (w + w_g) sin(theta)
///   h'   = (u + u_g) sin(theta) - (w + w_g) cos(theta)
///   u'   = -q w - g sin(theta)
///   w'   =  q u + g cos(theta) - F/m
///   th'  =  q
///   q'   =  tau / J_y
StateVector derivative(const StateVector& x, const ControlInput& c,
                       const QuadrotorParams& p, const GustSample& gust);

/// One classical RK4 step; control and gust are held constant across the step.
/// theta is wrapped to (-pi, pi] afterwards.
StateVector step_rk4(const StateVector& x, const ControlInput& c,
                     const QuadrotorParams& p, const GustSample& gust, double dt);

/// Jacobian of the gust-free dynamics w.r.t. the state. Columns 1-2 (p_n, h)
/// and row 6 (q) are identically zero.
Mat6 process_jacobian(const StateVector& x, const QuadrotorParams& p);

/// Position measurement z = (p_n, h).
Vec2 measurement(const StateVector& x);

/// Constant measurement Jacobian: rows e1^T, e2^T.
Mat26 measurement_jacobian();

} // namespace gustnav
