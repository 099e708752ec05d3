#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gustnav/dynamics.hpp"

using namespace gustnav;

namespace {

const QuadrotorParams kQuad{1.5, 9.81, 0.057};
const ControlInput kTrim{1.5 * 9.81, 0.0};

StateVector random_state(std::mt19937_64& rng) {
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
    };
    StateVector x;
    x.p_n   = uni(-50.0, 50.0);
    x.h     = uni(0.0, 100.0);
    x.u     = uni(-20.0, 20.0);
    x.w     = uni(-20.0, 20.0);
    x.theta = uni(-1.5, 1.5);
    x.q     = uni(-20.0, 20.0);
    return x;
}

} // namespace

TEST_CASE("hover trim is an equilibrium of the derivative") {
    const StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    const StateVector d = derivative(x, kTrim, kQuad, GustSample{});
    CHECK(std::abs(d.p_n) <= 1e-13);
    CHECK(std::abs(d.h) <= 1e-13);
    CHECK(std::abs(d.u) <= 1e-13);
    CHECK(std::abs(d.w) <= 1e-13);
    CHECK(std::abs(d.theta) <= 1e-13);
    CHECK(std::abs(d.q) <= 1e-13);
}

TEST_CASE("pure forward motion at trim") {
    const StateVector x{0.0, 10.0, 2.0, 0.0, 0.0, 0.0};
    const StateVector d = derivative(x, kTrim, kQuad, GustSample{});
    CHECK(d.p_n == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(d.h) <= 1e-13);
    CHECK(std::abs(d.u) <= 1e-13);
    CHECK(std::abs(d.w) <= 1e-13);
}

TEST_CASE("gusts are velocity-additive in the kinematics") {
    const StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    const StateVector d = derivative(x, kTrim, kQuad, GustSample{5.0, 0.0});
    CHECK(d.p_n == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(std::abs(d.h) <= 1e-13);
    CHECK(std::abs(d.u) <= 1e-13);
    CHECK(std::abs(d.w) <= 1e-13);
}

TEST_CASE("vertical pitch: sin/cos swap the channels") {
    const StateVector x{0.0, 10.0, 1.0, 0.0, 3.14159265358979323846 / 2.0, 0.0};
    const StateVector d = derivative(x, ControlInput{0.0, 0.0}, kQuad, GustSample{});
    CHECK(std::abs(d.p_n - 0.0) < 1e-12);
    CHECK(std::abs(d.h - 1.0) < 1e-12);
    CHECK(std::abs(d.u - (-9.81)) < 1e-12);
    CHECK(std::abs(d.w - 0.0) < 1e-12);
    CHECK(std::abs(d.theta) < 1e-12);
    CHECK(std::abs(d.q) < 1e-12);
}

TEST_CASE("non-finite inputs are rejected") {
    StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    x.u = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(derivative(x, kTrim, kQuad, GustSample{}), InputError);
    x.u = 0.0;
    CHECK_THROWS_AS(derivative(x, ControlInput{-1.0, 0.0}, kQuad, GustSample{}), InputError);
    GustSample g;
    g.u_g = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(derivative(x, kTrim, kQuad, g), InputError);
}

TEST_CASE("rk4 preserves the hover equilibrium") {
    const StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    for (double dt : {1e-3, 1e-2, 0.1, 1.0}) {
        const StateVector y = step_rk4(x, kTrim, kQuad, GustSample{}, dt);
        CHECK(std::abs(y.p_n - x.p_n) < 1e-12);
        CHECK(std::abs(y.h - x.h) < 1e-12);
        CHECK(std::abs(y.u) < 1e-12);
        CHECK(std::abs(y.w) < 1e-12);
        CHECK(std::abs(y.theta) < 1e-12);
        CHECK(std::abs(y.q) < 1e-12);
    }
}

TEST_CASE("rk4 matches a finely sub-stepped reference integration") {
    // oracle: the same step applied 1000x at dt=1e-5
    const StateVector x0{0.0, 10.0, 0.0, 0.0, 0.0, 1.0};
    StateVector ref = x0;
    for (int i = 0; i < 1000; ++i)
        ref = step_rk4(ref, kTrim, kQuad, GustSample{}, 1e-5);

    const StateVector one = step_rk4(x0, kTrim, kQuad, GustSample{}, 0.01);
    CHECK(std::abs(one.p_n - ref.p_n) < 1e-9);
    CHECK(std::abs(one.h - ref.h) < 1e-9);
    CHECK(std::abs(one.u - ref.u) < 1e-9);
    CHECK(std::abs(one.w - ref.w) < 1e-9);
    CHECK(std::abs(one.theta - ref.theta) < 1e-9);
    CHECK(std::abs(one.q - ref.q) < 1e-9);
    CHECK(std::abs(one.theta - 0.01) < 1e-5);
}

TEST_CASE("rk4 step halving converges") {
    std::mt19937_64 rng(42);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 20; ++trial) {
        StateVector x;
        x.p_n   = uni(-50.0, 50.0);
        x.h     = uni(0.0, 100.0);
        x.u     = uni(-5.0, 5.0);
        x.w     = uni(-5.0, 5.0);
        x.theta = uni(-1.5, 1.5);
        x.q     = uni(-2.0, 2.0);
        const ControlInput c{10.0, 0.1};
        const StateVector two  = step_rk4(step_rk4(x, c, kQuad, GustSample{}, 0.005), c, kQuad,
                                          GustSample{}, 0.005);
        const StateVector once = step_rk4(x, c, kQuad, GustSample{}, 0.01);
        CHECK(std::abs(two.p_n - once.p_n) < 1e-8);
        CHECK(std::abs(two.h - once.h) < 1e-8);
        CHECK(std::abs(two.u - once.u) < 1e-8);
        CHECK(std::abs(two.w - once.w) < 1e-8);
        CHECK(std::abs(two.theta - once.theta) < 1e-8);
        CHECK(std::abs(two.q - once.q) < 1e-8);
    }
}

TEST_CASE("rk4 rejects bad dt") {
    const StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(step_rk4(x, kTrim, kQuad, GustSample{}, 0.0), InputError);
    CHECK_THROWS_AS(step_rk4(x, kTrim, kQuad, GustSample{}, -0.1), InputError);
    CHECK_THROWS_AS(step_rk4(x, kTrim, kQuad, GustSample{},
                             std::numeric_limits<double>::quiet_NaN()),
                    InputError);
}

TEST_CASE("jacobian at trim has the expected nonzeros") {
    const StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    const Mat6 F = process_jacobian(x, kQuad);
    CHECK(F(0, 2) == doctest::Approx(1.0));
    CHECK(F(1, 3) == doctest::Approx(-1.0));
    CHECK(F(2, 4) == doctest::Approx(-9.81));
    CHECK(F(3, 4) == doctest::Approx(0.0));
    CHECK(F(4, 5) == doctest::Approx(1.0));
    double sum_abs = F.cwiseAbs().sum();
    CHECK(sum_abs == doctest::Approx(1.0 + 1.0 + 9.81 + 1.0));
}

TEST_CASE("jacobian matches central finite differences") {
    // oracle: central differences of `derivative` with step 1e-6, zero gust
    std::mt19937_64 rng(7);
    const ControlInput c{10.0, 0.05};
    const double step = 1e-6;

    double max_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const StateVector x = random_state(rng);
        const Mat6 F        = process_jacobian(x, kQuad);
        for (int j = 0; j < 6; ++j) {
            Vec6 lo = x.as_vector(), hi = x.as_vector();
            lo(j) -= step;
            hi(j) += step;
            const Vec6 dlo = derivative(StateVector::from_vector(lo), c, kQuad, GustSample{}).as_vector();
            const Vec6 dhi = derivative(StateVector::from_vector(hi), c, kQuad, GustSample{}).as_vector();
            const Vec6 fd  = (dhi - dlo) / (2.0 * step);
            for (int i = 0; i < 6; ++i) {
                const double rel = std::abs(F(i, j) - fd(i)) / std::max(1.0, std::abs(F(i, j)));
                max_rel          = std::max(max_rel, rel);
            }
        }
    }
    CHECK(max_rel < 1e-5);
}

TEST_CASE("jacobian columns for positions and row for pitch rate are zero") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat6 F = process_jacobian(random_state(rng), kQuad);
        CHECK(F.col(0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(F.col(1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(F.row(5).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("measurement projects onto position") {
    const StateVector x{3.0, 10.0, 1.0, 2.0, 0.1, 0.0};
    const Vec2 z = measurement(x);
    CHECK(z(0) == 3.0);
    CHECK(z(1) == 10.0);
    CHECK(measurement(StateVector{}).isZero());

    const Mat26 H = measurement_jacobian();
    CHECK(H(0, 0) == 1.0);
    CHECK(H(1, 1) == 1.0);
    CHECK(H.sum() == 2.0);
    CHECK(H.row(0).sum() == 1.0);
    CHECK(H.row(1).sum() == 1.0);
}

TEST_CASE("theta wraps to (-pi, pi] after a step") {
    CHECK(wrap_pi(3.14159265358979323846) == doctest::Approx(3.14159265358979323846));
    CHECK(wrap_pi(-3.14159265358979323846) == doctest::Approx(3.14159265358979323846));
    CHECK(wrap_pi(4.0) == doctest::Approx(4.0 - 2.0 * 3.14159265358979323846));

    StateVector x{0.0, 10.0, 0.0, 0.0, 3.1, 0.0};
    x.q = 50.0; // spins fast enough to cross pi within one step
    for (int i = 0; i < 200; ++i) {
        x = step_rk4(x, ControlInput{kQuad.mass * kQuad.gravity, 0.0}, kQuad, GustSample{}, 0.01);
        CHECK(x.theta > -3.14159265358979323846);
        CHECK(x.theta <= 3.14159265358979323846);
    }
}

TEST_CASE("hover integrates drift-free for 100 s") {
    StateVector x{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    const ControlInput trim{kQuad.mass * kQuad.gravity, 0.0};
    for (int i = 0; i < 10000; ++i)
        x = step_rk4(x, trim, kQuad, GustSample{}, 0.01);
    CHECK(std::abs(x.p_n) < 1e-9);
    CHECK(std::abs(x.h - 10.0) < 1e-9);
    CHECK(std::abs(x.u) < 1e-9);
    CHECK(std::abs(x.w) < 1e-9);
    CHECK(std::abs(x.theta) < 1e-9);
    CHECK(std::abs(x.q) < 1e-9);
}
