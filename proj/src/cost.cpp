#include "gustnav/cost.hpp"

#include <cmath>

namespace gustnav {

void CostSpec::validate() const {
    if (!(beta1 >= 0.0) || !(beta2 >= 0.0) || !(alpha1 >= 0.0) || !(alpha2 >= 0.0))
        throw ConfigError("cost: weights must be >= 0");
}

double cost_least_squares(std::span<const double> true_x, std::span<const double> true_h,
                          std::span<const double> est_x, std::span<const double> est_h) {
    const std::size_t n = true_x.size();
    if (n < 1)
        throw InputError("cost_least_squares: series must have at least one sample");
    if (true_h.size() != n || est_x.size() != n || est_h.size() != n)
        throw InputError("cost_least_squares: series length mismatch");

    double j = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = true_x[i] - est_x[i];
        const double dh = true_h[i] - est_h[i];
        j += dx * dx + dh * dh;
    }
    return j;
}

double cost_smooth(std::span<const double> meas_x, std::span<const double> meas_h,
                   std::span<const double> est_x, std::span<const double> est_h,
                   const CostSpec& spec) {
    spec.validate();
    const std::size_t n = meas_x.size();
    if (n < 2)
        throw InputError("cost_smooth: series must have at least two samples");
    if (meas_h.size() != n || est_x.size() != n || est_h.size() != n)
        throw InputError("cost_smooth: series length mismatch");

    double sq_x = 0.0, sq_h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = meas_x[i] - est_x[i];
        const double dh = meas_h[i] - est_h[i];
        sq_x += dx * dx;
        sq_h += dh * dh;
    }
    double tv_x = 0.0, tv_h = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        tv_x += std::abs(est_x[i] - est_x[i - 1]);
        tv_h += std::abs(est_h[i] - est_h[i - 1]);
    }
    return spec.beta1 * std::sqrt(sq_x / double(n)) + spec.beta2 * std::sqrt(sq_h / double(n)) +
           spec.alpha1 * tv_x + spec.alpha2 * tv_h;
}

} // namespace gustnav
