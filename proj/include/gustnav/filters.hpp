#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gustnav/dynamics.hpp"
#include "gustnav/rng.hpp"
#include "gustnav/types.hpp"

namespace gustnav {

/// Gaussian posterior: mean plus 6x6 covariance, re-symmetrized every step.
struct GaussianBelief {
    StateVector mean;
    Mat6 cov = Mat6::Zero();
};

/// Diagonal process/measurement noise variances.
struct NoiseConfig {
    Vec6 q_diag = Vec6::Zero();
    Vec2 r_diag = Vec2::Ones();

    void validate() const;
};

/// Scaled unscented transform parameters (state dimension n = 6).
struct UkfParams {
    double alpha = 0.4;
    double beta  = 2.0;
    double kappa = 0.0;

    double lambda() const { return alpha * alpha * (6.0 + kappa) - 6.0; }
    void validate() const;
};

/// 2n+1 sigma points with mean/covariance weights.
struct SigmaPointSet {
    static constexpr int kCount = 13;
    std::array<Vec6, kCount> points;
    std::array<double, kCount> w_mean;
    std::array<double, kCount> w_cov;
};

/// Process model hooks shared by all filters: mean propagation over dt and the
/// dynamics Jacobian. The default binds the quadrotor model with zero gust —
/// the filters model the vehicle without wind; turbulence acts only on the
/// truth simulation.
struct ProcessModel {
    std::function<StateVector(const StateVector&, const ControlInput&, double)> propagate;
    std::function<Mat6(const StateVector&)> jacobian;
};

ProcessModel quadrotor_process_model(const QuadrotorParams& p);

// ---------------------------------------------------------------------------
// EKF
// ---------------------------------------------------------------------------

/// Mean through the process model; covariance through Phi P Phi^T + Q*dt with
/// the first-order transition Phi = I + F*dt.
GaussianBelief ekf_predict(const GaussianBelief& b, const ControlInput& c, double dt,
                           const NoiseConfig& noise, const ProcessModel& model);

/// Kalman update with the constant position-measurement Jacobian; Joseph-form
/// covariance update.
GaussianBelief ekf_update(const GaussianBelief& b, const Vec2& z, const NoiseConfig& noise);

// ---------------------------------------------------------------------------
// UKF
// ---------------------------------------------------------------------------

/// Scaled unscented transform points:
///   x_0 = mean, x_i = mean +/- column i of sqrt((n+lambda) P)
///   W_m0 = lambda/(n+lambda), W_c0 = W_m0 + 1 - alpha^2 + beta,
///   W_i = 1/(2(n+lambda))
/// Factorization failures escalate a diagonal jitter 1e-12 -> 1e-6 before
/// raising a NumericsError.
SigmaPointSet ukf_sigma_points(const GaussianBelief& b, const UkfParams& p);

GaussianBelief ukf_predict(const GaussianBelief& b, const ControlInput& c, double dt,
                           const NoiseConfig& noise, const UkfParams& p,
                           const ProcessModel& model);

GaussianBelief ukf_update(const GaussianBelief& b, const Vec2& z, const NoiseConfig& noise,
                          const UkfParams& p);

// ---------------------------------------------------------------------------
// Bootstrap particle filter
// ---------------------------------------------------------------------------

struct ParticleSet {
    std::vector<StateVector> particles;
    std::vector<double> weights; ///< normalized, sum to 1
};

/// Particles drawn around `mean` with per-component std `spread_std`.
ParticleSet make_particle_set(const StateVector& mean, const Vec6& spread_std, int count,
                              RandomStream& rng);

/// 1 / sum(w_i^2); in [1, N] for normalized weights.
double effective_sample_size(const ParticleSet& ps);

/// Low-variance systematic resampling with offset u0 in [0, 1).
/// Equal weights reproduce the input set exactly.
void systematic_resample(ParticleSet& ps, double u0);

struct PfStepResult {
    StateVector estimate;    ///< weighted mean (before any resampling)
    Vec2 position_variance;  ///< weighted sample variance of (p_n, h)
    double ess = 0.0;
    bool resampled  = false;
    bool degenerate = false; ///< all weights underflowed; set was reset to uniform
};

/// Propagate every particle through the process model plus additive zero-mean
/// Gaussian process noise with covariance diag(q)*dt.
void pf_propagate(ParticleSet& ps, const ControlInput& c, double dt, const NoiseConfig& noise,
                  RandomStream& rng, const ProcessModel& model);

/// Weight by the Gaussian likelihood of z, normalize, estimate, and resample
/// systematically when ESS < N/2. Total weight underflow resets to uniform and
/// flags the step; the run continues.
PfStepResult pf_weight_update(ParticleSet& ps, const Vec2& z, const NoiseConfig& noise,
                              RandomStream& rng);

/// One full bootstrap step: propagate, then weight/update.
PfStepResult pf_step(ParticleSet& ps, const ControlInput& c, const Vec2& z, double dt,
                     const NoiseConfig& noise, RandomStream& rng, const ProcessModel& model);

// ---------------------------------------------------------------------------
// Common step interface for the harness
// ---------------------------------------------------------------------------

enum class FilterKind { Ekf, Ukf, Pf };

const char* filter_name(FilterKind k);

class Estimator {
public:
    virtual ~Estimator() = default;
    virtual void predict(const ControlInput& c, double dt) = 0;
    virtual void update(const Vec2& z)                     = 0;
    virtual StateVector mean() const                       = 0;
    virtual Vec2 position_variance() const                 = 0;
    virtual bool last_step_degenerate() const { return false; }
};

class EkfEstimator final : public Estimator {
public:
    EkfEstimator(const GaussianBelief& init, const NoiseConfig& noise, ProcessModel model)
        : belief_(init), noise_(noise), model_(std::move(model)) {}

    void predict(const ControlInput& c, double dt) override {
        belief_ = ekf_predict(belief_, c, dt, noise_, model_);
    }
    void update(const Vec2& z) override { belief_ = ekf_update(belief_, z, noise_); }
    StateVector mean() const override { return belief_.mean; }
    Vec2 position_variance() const override { return belief_.cov.diagonal().head<2>(); }
    const GaussianBelief& belief() const { return belief_; }

private:
    GaussianBelief belief_;
    NoiseConfig noise_;
    ProcessModel model_;
};

class UkfEstimator final : public Estimator {
public:
    UkfEstimator(const GaussianBelief& init, const NoiseConfig& noise, const UkfParams& params,
                 ProcessModel model)
        : belief_(init), noise_(noise), params_(params), model_(std::move(model)) {}

    void predict(const ControlInput& c, double dt) override {
        belief_ = ukf_predict(belief_, c, dt, noise_, params_, model_);
    }
    void update(const Vec2& z) override { belief_ = ukf_update(belief_, z, noise_, params_); }
    StateVector mean() const override { return belief_.mean; }
    Vec2 position_variance() const override { return belief_.cov.diagonal().head<2>(); }
    const GaussianBelief& belief() const { return belief_; }

private:
    GaussianBelief belief_;
    NoiseConfig noise_;
    UkfParams params_;
    ProcessModel model_;
};

class PfEstimator final : public Estimator {
public:
    PfEstimator(const StateVector& init_mean, const Vec6& init_std, int count,
                const NoiseConfig& noise, ProcessModel model, std::uint64_t seed);

    void predict(const ControlInput& c, double dt) override;
    void update(const Vec2& z) override;
    StateVector mean() const override { return last_.estimate; }
    Vec2 position_variance() const override { return last_.position_variance; }
    bool last_step_degenerate() const override { return last_.degenerate; }
    const ParticleSet& particles() const { return set_; }

private:
    ParticleSet set_;
    NoiseConfig noise_;
    ProcessModel model_;
    RandomStream rng_;
    PfStepResult last_;
};

// ---------------------------------------------------------------------------
// Baseline tunings shipped as defaults
// ---------------------------------------------------------------------------

/// EKF noise tuned against the true-position least-squares cost.
NoiseConfig baseline_ekf_noise();
/// EKF noise tuned against the four-term measurement+smoothness cost.
NoiseConfig baseline_ekf_noise_smooth();
NoiseConfig baseline_ukf_noise();
UkfParams baseline_ukf_params();
NoiseConfig baseline_pf_noise();
constexpr int kBaselinePfParticles = 5000;

} // namespace gustnav
