#include "gustnav/tuner.hpp"

#include <cmath>
#include <limits>

#include "gustnav/harness.hpp"

namespace gustnav {

namespace {

constexpr int kNoiseGenes = 8; // log10 q1..q6, log10 r1, r2

std::vector<double> log_encode(const NoiseConfig& noise) {
    std::vector<double> g(kNoiseGenes);
    for (int i = 0; i < 6; ++i)
        g[i] = std::log10(noise.q_diag(i));
    g[6] = std::log10(noise.r_diag(0));
    g[7] = std::log10(noise.r_diag(1));
    return g;
}

} // namespace

std::vector<GeneBound> tuning_bounds(FilterKind kind) {
    std::vector<GeneBound> b;
    for (int i = 0; i < 6; ++i)
        b.push_back({-19.0, -1.0}); // log10 q
    b.push_back({-4.0, 1.0});       // log10 r1
    b.push_back({-4.0, 1.0});       // log10 r2
    if (kind == FilterKind::Ukf) {
        b.push_back({0.01, 1.0}); // alpha
        b.push_back({0.0, 10.0}); // beta
        b.push_back({0.0, 3.0});  // kappa
    }
    return b;
}

std::vector<double> encode_baseline_genome(FilterKind kind) {
    switch (kind) {
    case FilterKind::Ekf:
        return log_encode(baseline_ekf_noise());
    case FilterKind::Ukf: {
        auto g               = log_encode(baseline_ukf_noise());
        const UkfParams ukf  = baseline_ukf_params();
        g.push_back(ukf.alpha);
        g.push_back(ukf.beta);
        g.push_back(ukf.kappa);
        return g;
    }
    case FilterKind::Pf:
        return log_encode(baseline_pf_noise());
    }
    throw ConfigError("unknown filter kind");
}

void decode_genome(const std::vector<double>& genes, FilterKind kind, NoiseConfig& noise,
                   UkfParams& ukf) {
    const std::size_t expected = kind == FilterKind::Ukf ? kNoiseGenes + 3 : kNoiseGenes;
    if (genes.size() != expected)
        throw InputError("decode_genome: genome length mismatch");
    for (int i = 0; i < 6; ++i)
        noise.q_diag(i) = std::pow(10.0, genes[i]);
    noise.r_diag(0) = std::pow(10.0, genes[6]);
    noise.r_diag(1) = std::pow(10.0, genes[7]);
    if (kind == FilterKind::Ukf) {
        ukf.alpha = genes[8];
        ukf.beta  = genes[9];
        ukf.kappa = genes[10];
    }
}

TuneResult tune_filter(const ScenarioConfig& scenario, FilterKind kind, const CostSpec& cost,
                       const GaConfig& ga_cfg) {
    if (kind == FilterKind::Pf)
        throw ConfigError("tune: the particle filter is a run mode only; tune ekf or ukf");
    cost.validate();

    ScenarioConfig sc = scenario;
    if (sc.tuning.horizon > 0.0)
        sc.duration = sc.tuning.horizon;
    sc.validate();

    // one fixed realization shared by every genome evaluation
    const TruthRun truth = run_truth(sc);
    const std::size_t n  = truth.t.size();
    std::vector<double> truth_pn(n), truth_h(n), meas_pn(n), meas_h(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth_pn[i] = truth.truth[i].p_n;
        truth_h[i]  = truth.truth[i].h;
        meas_pn[i]  = truth.meas[i](0);
        meas_h[i]   = truth.meas[i](1);
    }

    FilterSetup proto = default_filter_setup(kind);
    for (const auto& f : sc.filters)
        if (f.kind == kind)
            proto = f; // keep the scenario's p0 for this filter

    auto evaluate = [&](const std::vector<double>& genes) -> double {
        FilterSetup setup = proto;
        try {
            decode_genome(genes, kind, setup.noise, setup.ukf);
            const FilterTrace trace = run_filter_trace(truth, sc, setup);
            if (!trace.degenerate_steps.empty())
                return std::numeric_limits<double>::infinity();
            std::vector<double> est_pn(n), est_h(n);
            for (std::size_t i = 0; i < n; ++i) {
                est_pn[i] = trace.est[i].p_n;
                est_h[i]  = trace.est[i].h;
            }
            if (cost.variant == CostSpec::Variant::LeastSquares)
                return cost_least_squares(truth_pn, truth_h, est_pn, est_h);
            return cost_smooth(meas_pn, meas_h, est_pn, est_h, cost);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const std::vector<double> baseline = encode_baseline_genome(kind);

    GaConfig ga = ga_cfg;
    ga.initial_genomes.insert(ga.initial_genomes.begin(), baseline);

    const GaResult run = ga_run(ga, evaluate, tuning_bounds(kind));

    TuneResult result;
    result.kind          = kind;
    result.best_cost     = run.best_cost;
    result.baseline_cost = evaluate(baseline);
    result.history       = run.history;
    result.best_genome   = run.best_genome;
    result.generations   = run.generations;
    UkfParams ukf;
    decode_genome(run.best_genome, kind, result.noise, ukf);
    if (kind == FilterKind::Ukf)
        result.ukf = ukf;
    return result;
}

} // namespace gustnav
