#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gustnav/errors.hpp"

namespace gustnav {

/// Inclusive per-gene search box.
struct GeneBound {
    double lo = 0.0;
    double hi = 1.0;
};

struct GaConfig {
    int population       = 50;
    int max_generations  = 600;
    double mutation_rate = 0.167;  ///< per-gene
    double crossover_prob = 0.8;
    double stop_tol      = 1e-6;   ///< stall tolerance on best-cost improvement
    int stall_generations = 25;    ///< consecutive stalled generations before stopping
    int elitism          = 2;
    std::uint64_t seed   = 1;
    /// Genomes injected into the initial population (clamped to the box).
    std::vector<std::vector<double>> initial_genomes;

    void validate(std::size_t genome_size) const;
};

struct GaResult {
    std::vector<double> best_genome;
    double best_cost = 0.0;
    std::vector<double> history; ///< best cost per generation (index 0 = initial population)
    int generations = 0;
};

using CostFn = std::function<double(const std::vector<double>&)>;

/// Real-valued GA: tournament selection (size 3), uniform crossover, per-gene
/// Gaussian mutation with std 0.1*(hi-lo), elitism. Non-finite costs are
/// penalized with +inf and never enter selection arithmetic. Fully
/// deterministic for a given (seed, config, cost).
GaResult ga_run(const GaConfig& cfg, const CostFn& cost, const std::vector<GeneBound>& bounds);

} // namespace gustnav
