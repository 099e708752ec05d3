#pragma once

#include <span>

#include "gustnav/errors.hpp"

namespace gustnav {

/// Tuning objective selector.
struct CostSpec {
    enum class Variant { LeastSquares, Smooth };

    Variant variant = Variant::LeastSquares;
    // Smooth-cost weights: accuracy on the two channels, then smoothness.
    double beta1  = 1.0;
    double beta2  = 60.0;
    double alpha1 = 10.0;
    double alpha2 = 5.0;

    void validate() const;
};

/// Sum of squared errors over both position channels:
///   J = sum (x_true - x_est)^2 + sum (h_true - h_est)^2
double cost_least_squares(std::span<const double> true_x, std::span<const double> true_h,
                          std::span<const double> est_x, std::span<const double> est_h);

/// Four-term accuracy + smoothness cost against measurements:
///   J = beta1*RMSE(x) + beta2*RMSE(h) + alpha1*sum|diff(x_est)| + alpha2*sum|diff(h_est)|
double cost_smooth(std::span<const double> meas_x, std::span<const double> meas_h,
                   std::span<const double> est_x, std::span<const double> est_h,
                   const CostSpec& spec);

} // namespace gustnav
