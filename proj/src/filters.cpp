#include "gustnav/filters.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace gustnav {

namespace {

constexpr int kN = 6; // state dimension

/// Check asymmetry, then force exact symmetry.
void enforce_symmetric(Mat6& m) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-9) || !m.allFinite())
        throw NumericsError("covariance lost symmetry beyond tolerance");
    m = (0.5 * (m + m.transpose())).eval();
}

Mat2 innovation_covariance(const Mat6& cov, const Vec2& r_diag) {
    Mat2 s = cov.topLeftCorner<2, 2>();
    s(0, 0) += r_diag(0);
    s(1, 1) += r_diag(1);
    return s;
}

Mat2 invert_2x2(const Mat2& s) {
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    if (!std::isfinite(det) || std::abs(det) < 1e-300)
        throw NumericsError("singular innovation covariance");
    Mat2 inv;
    inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
    return inv / det;
}

} // namespace

void NoiseConfig::validate() const {
    if (!q_diag.allFinite() || (q_diag.array() < 0.0).any())
        throw ConfigError("noise.q_diag: entries must be finite and >= 0");
    if (!r_diag.allFinite() || (r_diag.array() <= 0.0).any())
        throw ConfigError("noise.r_diag: entries must be finite and > 0");
}

void UkfParams::validate() const {
    if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha))
        throw ConfigError("ukf.alpha: must satisfy 0 < alpha <= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw ConfigError("ukf.beta: must be finite and >= 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw ConfigError("ukf.kappa: must be finite and >= 0");
    if (!(kN + lambda() > 0.0))
        throw ConfigError("ukf: n + lambda must be > 0");
}

ProcessModel quadrotor_process_model(const QuadrotorParams& p) {
    ProcessModel m;
    m.propagate = [p](const StateVector& x, const ControlInput& c, double dt) {
        return step_rk4(x, c, p, GustSample{}, dt);
    };
    m.jacobian = [p](const StateVector& x) { return process_jacobian(x, p); };
    return m;
}

// ---------------------------------------------------------------------------
// EKF
// ---------------------------------------------------------------------------

GaussianBelief ekf_predict(const GaussianBelief& b, const ControlInput& c, double dt,
                           const NoiseConfig& noise, const ProcessModel& model) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InputError("ekf_predict: dt must be finite and > 0");
    noise.validate();

    const Mat6 phi = Mat6::Identity() + model.jacobian(b.mean) * dt;

    GaussianBelief out;
    out.mean = model.propagate(b.mean, c, dt);
    out.cov  = phi * b.cov * phi.transpose();
    out.cov += (noise.q_diag * dt).asDiagonal();
    enforce_symmetric(out.cov);
    return out;
}

GaussianBelief ekf_update(const GaussianBelief& b, const Vec2& z, const NoiseConfig& noise) {
    if (!z.allFinite())
        throw InputError("ekf_update: measurement must be finite");
    noise.validate();

    const Mat26 H   = measurement_jacobian();
    const Vec2 zhat = measurement(b.mean);
    const Mat2 s    = innovation_covariance(b.cov, noise.r_diag);
    const Mat62 k   = b.cov * H.transpose() * invert_2x2(s);

    GaussianBelief out;
    Vec6 mean = b.mean.as_vector() + k * (z - zhat);
    mean(4)   = wrap_pi(mean(4));
    out.mean  = StateVector::from_vector(mean);

    // Joseph form
    const Mat6 ikh = Mat6::Identity() - k * H;
    out.cov = ikh * b.cov * ikh.transpose() + k * noise.r_diag.asDiagonal() * k.transpose();
    enforce_symmetric(out.cov);
    return out;
}

// ---------------------------------------------------------------------------
// UKF
// ---------------------------------------------------------------------------

SigmaPointSet ukf_sigma_points(const GaussianBelief& b, const UkfParams& p) {
    p.validate();
    const double lambda = p.lambda();
    const double scale  = kN + lambda;

    Mat6 cov = 0.5 * (b.cov + b.cov.transpose());
    if (!cov.allFinite())
        throw NumericsError("sigma points: covariance is not finite");

    Eigen::LLT<Mat6> llt;
    double jitter = 0.0;
    for (;;) {
        Mat6 attempt = cov;
        attempt.diagonal().array() += jitter;
        llt.compute(attempt);
        if (llt.info() == Eigen::Success && Mat6(llt.matrixL()).allFinite())
            break;
        if (jitter >= 1e-6)
            throw NumericsError("sigma points: covariance not factorizable after jitter");
        jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
    }

    const Mat6 root = Mat6(llt.matrixL()) * std::sqrt(scale);
    const Vec6 mean = b.mean.as_vector();

    SigmaPointSet set;
    set.points[0] = mean;
    for (int i = 0; i < kN; ++i) {
        set.points[1 + i]      = mean + root.col(i);
        set.points[1 + kN + i] = mean - root.col(i);
    }
    set.w_mean[0] = lambda / scale;
    set.w_cov[0]  = set.w_mean[0] + (1.0 - p.alpha * p.alpha + p.beta);
    for (int i = 1; i < SigmaPointSet::kCount; ++i) {
        set.w_mean[i] = 1.0 / (2.0 * scale);
        set.w_cov[i]  = set.w_mean[i];
    }
    return set;
}

GaussianBelief ukf_predict(const GaussianBelief& b, const ControlInput& c, double dt,
                           const NoiseConfig& noise, const UkfParams& p,
                           const ProcessModel& model) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InputError("ukf_predict: dt must be finite and > 0");
    noise.validate();

    SigmaPointSet set = ukf_sigma_points(b, p);
    for (auto& pt : set.points)
        pt = model.propagate(StateVector::from_vector(pt), c, dt).as_vector();

    Vec6 mean = Vec6::Zero();
    for (int i = 0; i < SigmaPointSet::kCount; ++i)
        mean += set.w_mean[i] * set.points[i];

    Mat6 cov = Mat6::Zero();
    for (int i = 0; i < SigmaPointSet::kCount; ++i) {
        const Vec6 d = set.points[i] - mean;
        cov += set.w_cov[i] * d * d.transpose();
    }
    cov += (noise.q_diag * dt).asDiagonal();

    GaussianBelief out;
    mean(4)  = wrap_pi(mean(4));
    out.mean = StateVector::from_vector(mean);
    out.cov  = cov;
    enforce_symmetric(out.cov);
    return out;
}

GaussianBelief ukf_update(const GaussianBelief& b, const Vec2& z, const NoiseConfig& noise,
                          const UkfParams& p) {
    if (!z.allFinite())
        throw InputError("ukf_update: measurement must be finite");
    noise.validate();

    const SigmaPointSet set = ukf_sigma_points(b, p);

    std::array<Vec2, SigmaPointSet::kCount> zpts;
    Vec2 zhat = Vec2::Zero();
    for (int i = 0; i < SigmaPointSet::kCount; ++i) {
        zpts[i] = measurement(StateVector::from_vector(set.points[i]));
        zhat += set.w_mean[i] * zpts[i];
    }

    Mat2 s = noise.r_diag.asDiagonal();
    Mat62 cross = Mat62::Zero();
    const Vec6 mean = b.mean.as_vector();
    for (int i = 0; i < SigmaPointSet::kCount; ++i) {
        const Vec2 dz = zpts[i] - zhat;
        s += set.w_cov[i] * dz * dz.transpose();
        cross += set.w_cov[i] * (set.points[i] - mean) * dz.transpose();
    }

    const Mat62 k = cross * invert_2x2(s);

    GaussianBelief out;
    Vec6 updated = mean + k * (z - zhat);
    updated(4)   = wrap_pi(updated(4));
    out.mean     = StateVector::from_vector(updated);
    out.cov      = b.cov - k * s * k.transpose();
    enforce_symmetric(out.cov);
    return out;
}

// ---------------------------------------------------------------------------
// Bootstrap particle filter
// ---------------------------------------------------------------------------

ParticleSet make_particle_set(const StateVector& mean, const Vec6& spread_std, int count,
                              RandomStream& rng) {
    if (count < 1)
        throw ConfigError("particle set: count must be >= 1");
    if (!spread_std.allFinite() || (spread_std.array() < 0.0).any())
        throw ConfigError("particle set: spread std must be finite and >= 0");

    ParticleSet ps;
    ps.particles.reserve(count);
    const Vec6 m = mean.as_vector();
    for (int i = 0; i < count; ++i) {
        Vec6 x = m;
        for (int j = 0; j < kN; ++j)
            x(j) += spread_std(j) * rng.normal();
        x(4) = wrap_pi(x(4));
        ps.particles.push_back(StateVector::from_vector(x));
    }
    ps.weights.assign(count, 1.0 / double(count));
    return ps;
}

double effective_sample_size(const ParticleSet& ps) {
    double sum_sq = 0.0;
    for (double w : ps.weights)
        sum_sq += w * w;
    return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

void systematic_resample(ParticleSet& ps, double u0) {
    const std::size_t n = ps.particles.size();
    std::vector<StateVector> out(n);
    std::size_t i = 0;
    double cum = ps.weights[0];
    for (std::size_t j = 0; j < n; ++j) {
        const double u = (double(j) + u0) / double(n);
        while (u > cum && i + 1 < n) {
            ++i;
            cum += ps.weights[i];
        }
        out[j] = ps.particles[i];
    }
    ps.particles = std::move(out);
    ps.weights.assign(n, 1.0 / double(n));
}

void pf_propagate(ParticleSet& ps, const ControlInput& c, double dt, const NoiseConfig& noise,
                  RandomStream& rng, const ProcessModel& model) {
    if (ps.particles.empty())
        throw InputError("pf: particle set is empty");
    noise.validate();

    Vec6 step_std;
    for (int j = 0; j < kN; ++j)
        step_std(j) = std::sqrt(noise.q_diag(j) * dt);

    for (auto& particle : ps.particles) {
        Vec6 x = model.propagate(particle, c, dt).as_vector();
        for (int j = 0; j < kN; ++j)
            x(j) += step_std(j) * rng.normal();
        x(4)     = wrap_pi(x(4));
        particle = StateVector::from_vector(x);
    }
}

PfStepResult pf_weight_update(ParticleSet& ps, const Vec2& z, const NoiseConfig& noise,
                              RandomStream& rng) {
    if (!z.allFinite())
        throw InputError("pf: measurement must be finite");
    noise.validate();
    const std::size_t n = ps.particles.size();

    PfStepResult res;

    // log-likelihoods, normalized by the max before exponentiation
    std::vector<double> loglik(n);
    double max_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = z(0) - ps.particles[i].p_n;
        const double dh = z(1) - ps.particles[i].h;
        loglik[i] = -0.5 * (dp * dp / noise.r_diag(0) + dh * dh / noise.r_diag(1));
        if (loglik[i] > max_ll)
            max_ll = loglik[i];
    }

    double sum = 0.0;
    if (std::isfinite(max_ll)) {
        for (std::size_t i = 0; i < n; ++i) {
            ps.weights[i] *= std::exp(loglik[i] - max_ll);
            sum += ps.weights[i];
        }
    }

    if (!(sum > 0.0) || !std::isfinite(sum)) {
        // total underflow: reset to uniform, flag, and keep going
        ps.weights.assign(n, 1.0 / double(n));
        res.degenerate = true;
    } else {
        for (auto& w : ps.weights)
            w /= sum;
    }

    Vec6 mean = Vec6::Zero();
    for (std::size_t i = 0; i < n; ++i)
        mean += ps.weights[i] * ps.particles[i].as_vector();
    res.estimate = StateVector::from_vector(mean);

    Vec2 var = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = ps.particles[i].p_n - mean(0);
        const double dh = ps.particles[i].h - mean(1);
        var(0) += ps.weights[i] * dp * dp;
        var(1) += ps.weights[i] * dh * dh;
    }
    res.position_variance = var;

    res.ess = effective_sample_size(ps);
    if (res.ess < 0.5 * double(n)) {
        systematic_resample(ps, rng.uniform());
        res.resampled = true;
    }
    return res;
}

PfStepResult pf_step(ParticleSet& ps, const ControlInput& c, const Vec2& z, double dt,
                     const NoiseConfig& noise, RandomStream& rng, const ProcessModel& model) {
    pf_propagate(ps, c, dt, noise, rng, model);
    return pf_weight_update(ps, z, noise, rng);
}

PfEstimator::PfEstimator(const StateVector& init_mean, const Vec6& init_std, int count,
                         const NoiseConfig& noise, ProcessModel model, std::uint64_t seed)
    : noise_(noise), model_(std::move(model)), rng_(sub_seed(seed, Stream::Particles)) {
    RandomStream init_rng(sub_seed(seed, Stream::ParticleInit));
    set_ = make_particle_set(init_mean, init_std, count, init_rng);
    last_.estimate = init_mean;
    Vec2 var(init_std(0) * init_std(0), init_std(1) * init_std(1));
    last_.position_variance = var;
}

void PfEstimator::predict(const ControlInput& c, double dt) {
    pf_propagate(set_, c, dt, noise_, rng_, model_);
}

void PfEstimator::update(const Vec2& z) {
    last_ = pf_weight_update(set_, z, noise_, rng_);
}

// ---------------------------------------------------------------------------
// Baseline tunings
// ---------------------------------------------------------------------------

const char* filter_name(FilterKind k) {
    switch (k) {
    case FilterKind::Ekf: return "ekf";
    case FilterKind::Ukf: return "ukf";
    case FilterKind::Pf: return "pf";
    }
    return "?";
}

NoiseConfig baseline_ekf_noise() {
    NoiseConfig n;
    n.q_diag << 4.83e-05, 2.25e-03, 1.25e-03, 1.86e-03, 2.23e-05, 2.19e-05;
    n.r_diag << 0.9999, 0.9999;
    return n;
}

NoiseConfig baseline_ekf_noise_smooth() {
    NoiseConfig n;
    n.q_diag << 9.9924e-05, 3.7216e-05, 7.5426e-05, 2.9733e-04, 9.3899e-05, 1.7283e-05;
    n.r_diag << 0.9999, 0.999;
    return n;
}

NoiseConfig baseline_ukf_noise() {
    NoiseConfig n;
    n.q_diag << 1.0e-18, 1.0e-11, 1.0e-19, 1.0e-10, 1.0e-17, 1.0e-12;
    n.r_diag << 0.9999999, 0.9999999;
    return n;
}

UkfParams baseline_ukf_params() {
    return UkfParams{0.4, 2.0, 0.0};
}

NoiseConfig baseline_pf_noise() {
    NoiseConfig n;
    n.q_diag << 4.8254e-05, 2.2522e-03, 1.2468e-03, 1.8631e-03, 2.2304e-05, 2.1894e-05;
    n.r_diag << 0.9999, 0.999;
    return n;
}

} // namespace gustnav
