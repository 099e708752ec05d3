#include "gustnav/dynamics.hpp"

#include <cmath>

namespace gustnav {

namespace {

constexpr double kPi = 3.14159265358979323846;

StateVector axpy(const StateVector& x, double s, const StateVector& k) {
    return StateVector{x.p_n + s * k.p_n, x.h + s * k.h,         x.u + s * k.u,
                       x.w + s * k.w,     x.theta + s * k.theta, x.q + s * k.q};
}

void check_inputs(const StateVector& x, const ControlInput& c,
                  const QuadrotorParams& p, const GustSample& gust) {
    if (!x.is_finite())
        throw InputError("dynamics: state must be finite");
    if (!c.is_finite())
        throw InputError("dynamics: control must be finite");
    if (c.thrust < 0.0)
        throw InputError("dynamics: thrust must be >= 0");
    if (!gust.is_finite())
        throw InputError("dynamics: gust must be finite");
    p.validate();
}

} // namespace

double wrap_pi(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    else if (a > kPi)
        a -= 2.0 * kPi;
    return a;
}

StateVector derivative(const StateVector& x, const ControlInput& c,
                       const QuadrotorParams& p, const GustSample& gust) {
    check_inputs(x, c, p, gust);

    const double st = std::sin(x.theta);
    const double ct = std::cos(x.theta);
    const double ug = x.u + gust.u_g; // ground-relative advection velocities
    const double wg = x.w + gust.w_g;

    StateVector d;
    d.p_n   = ug * ct + wg * st;
    d.h     = ug * st - wg * ct;
    d.u     = -x.q * x.w - p.gravity * st;
    d.w     = x.q * x.u + p.gravity * ct - c.thrust / p.mass;
    d.theta = x.q;
    d.q     = c.pitch_torque / p.inertia_y;
    return d;
}

StateVector step_rk4(const StateVector& x, const ControlInput& c,
                     const QuadrotorParams& p, const GustSample& gust, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InputError("step_rk4: dt must be finite and > 0");

    const StateVector k1 = derivative(x, c, p, gust);
    const StateVector k2 = derivative(axpy(x, 0.5 * dt, k1), c, p, gust);
    const StateVector k3 = derivative(axpy(x, 0.5 * dt, k2), c, p, gust);
    const StateVector k4 = derivative(axpy(x, dt, k3), c, p, gust);

    StateVector out;
    const double s = dt / 6.0;
    out.p_n   = x.p_n + s * (k1.p_n + 2.0 * k2.p_n + 2.0 * k3.p_n + k4.p_n);
    out.h     = x.h + s * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h);
    out.u     = x.u + s * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.w     = x.w + s * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    out.theta = wrap_pi(x.theta + s * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta));
    out.q     = x.q + s * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    return out;
}

Mat6 process_jacobian(const StateVector& x, const QuadrotorParams& p) {
    if (!x.is_finite())
        throw InputError("process_jacobian: state must be finite");
    p.validate();

    const double st = std::sin(x.theta);
    const double ct = std::cos(x.theta);

    Mat6 F = Mat6::Zero();
    F(0, 2) = ct;
    F(0, 3) = st;
    F(0, 4) = -x.u * st + x.w * ct;
    F(1, 2) = st;
    F(1, 3) = -ct;
    F(1, 4) = x.u * ct + x.w * st;
    F(2, 3) = -x.q;
    F(2, 4) = -p.gravity * ct;
    F(2, 5) = -x.w;
    F(3, 2) = x.q;
    F(3, 4) = -p.gravity * st;
    F(3, 5) = x.u;
    F(4, 5) = 1.0;
    return F;
}

Vec2 measurement(const StateVector& x) {
    return Vec2(x.p_n, x.h);
}

Mat26 measurement_jacobian() {
    Mat26 H = Mat26::Zero();
    H(0, 0) = 1.0;
    H(1, 1) = 1.0;
    return H;
}

} // namespace gustnav
