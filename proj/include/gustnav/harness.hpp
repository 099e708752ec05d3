#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gustnav/scenario.hpp"

namespace gustnav {

/// One truth realization: state, gusts, and noisy position measurements.
/// All series have step_count()+1 entries; index k is time k*dt. gusts[k] is
/// the sample held over the step from k-1 to k (gusts[0] is the initial rest
/// state of the shaping filters).
struct TruthRun {
    std::vector<double> t;
    std::vector<StateVector> truth;
    std::vector<GustSample> gusts;
    std::vector<Vec2> meas;
};

TruthRun run_truth(const ScenarioConfig& cfg);

/// Per-filter estimate series plus wall-time accounting. Wall time covers the
/// predict/update calls only, never truth simulation or I/O.
struct FilterTrace {
    FilterKind kind = FilterKind::Ekf;
    std::vector<StateVector> est;
    std::vector<Vec2> var_pos; ///< diagonal covariance of (p_n, h)
    std::vector<std::uint32_t> degenerate_steps;
    double filter_seconds = 0.0;
    std::uint64_t steps   = 0;
};

/// Run one filter over an existing truth realization.
FilterTrace run_filter_trace(const TruthRun& truth, const ScenarioConfig& cfg,
                             const FilterSetup& setup);

struct RunResult {
    TruthRun truth;
    std::vector<FilterTrace> traces;
};

/// One shared truth realization, every selected filter fed the identical
/// measurement series. Filter numerical failures are recorded per step and the
/// run completes.
RunResult run_comparison(const ScenarioConfig& cfg, const std::vector<FilterSetup>& filters);

struct ChannelMetrics {
    double rmse            = 0.0;
    double total_variation = 0.0;
};

struct FilterMetrics {
    FilterKind kind = FilterKind::Ekf;
    ChannelMetrics pn;
    ChannelMetrics h;
    double mean_step_seconds     = 0.0;
    std::size_t degenerate_count = 0;
};

struct Metrics {
    ChannelMetrics meas_pn; ///< raw measurements scored against truth
    ChannelMetrics meas_h;
    std::vector<FilterMetrics> filters;
};

Metrics compute_metrics(const RunResult& result);

/// Write trajectory.csv, gusts.csv, metrics.csv, run.json (a resolved config
/// echo sufficient to re-run the experiment), and plot_results.py into out_dir.
/// Output bytes are deterministic for fixed inputs.
void write_outputs(const RunResult& result, const Metrics& metrics, const ScenarioConfig& cfg,
                   const std::string& out_dir);

} // namespace gustnav
