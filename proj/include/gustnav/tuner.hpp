#pragma once

#include <optional>
#include <vector>

#include "gustnav/cost.hpp"
#include "gustnav/ga.hpp"
#include "gustnav/scenario.hpp"

namespace gustnav {

/// Search box for a filter's genome. Noise genes live in log10 space:
/// [q1..q6, r1, r2] for the EKF, plus [alpha, beta, kappa] (linear) for the UKF.
std::vector<GeneBound> tuning_bounds(FilterKind kind);

/// Baseline tuning encoded as a genome (log10 noise genes).
std::vector<double> encode_baseline_genome(FilterKind kind);

/// Decode a genome into filter parameters.
void decode_genome(const std::vector<double>& genes, FilterKind kind, NoiseConfig& noise,
                   UkfParams& ukf);

struct TuneResult {
    FilterKind kind = FilterKind::Ekf;
    NoiseConfig noise;
    std::optional<UkfParams> ukf;
    double best_cost     = 0.0;
    double baseline_cost = 0.0; ///< baseline genome scored on the same realization
    std::vector<double> history;
    std::vector<double> best_genome;
    int generations = 0;
};

/// GA-tune a filter's noise parameters (and UKF spread parameters) on one
/// fixed-seed scenario realization, so the objective is deterministic per
/// genome (common random numbers). The initial population is warm-started with
/// the baseline genome; with elitism the result never scores worse than the
/// baseline. The tuning horizon comes from scenario.tuning.horizon.
///
/// Supports EKF and UKF; the particle filter is a run mode only.
TuneResult tune_filter(const ScenarioConfig& scenario, FilterKind kind, const CostSpec& cost,
                       const GaConfig& ga_cfg);

} // namespace gustnav
