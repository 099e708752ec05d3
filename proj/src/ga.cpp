#include "gustnav/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gustnav/rng.hpp"

namespace gustnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
    std::vector<double> genes;
    double cost = kInf;
};

double penalized(const CostFn& cost, const std::vector<double>& genes) {
    const double c = cost(genes);
    return std::isfinite(c) ? c : kInf;
}

void clamp_to(const std::vector<GeneBound>& bounds, std::vector<double>& genes) {
    for (std::size_t i = 0; i < genes.size(); ++i)
        genes[i] = std::clamp(genes[i], bounds[i].lo, bounds[i].hi);
}

} // namespace

void GaConfig::validate(std::size_t genome_size) const {
    if (population < 2)
        throw ConfigError("ga.population: must be >= 2");
    if (max_generations < 1)
        throw ConfigError("ga.max_generations: must be >= 1");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw ConfigError("ga.mutation_rate: must be in [0, 1]");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
        throw ConfigError("ga.crossover_prob: must be in [0, 1]");
    if (!(stop_tol > 0.0))
        throw ConfigError("ga.stop_tol: must be > 0");
    if (stall_generations < 1)
        throw ConfigError("ga.stall_generations: must be >= 1");
    if (elitism < 0 || elitism >= population)
        throw ConfigError("ga.elitism: must be in [0, population)");
    for (const auto& g : initial_genomes)
        if (g.size() != genome_size)
            throw ConfigError("ga.initial_genomes: genome length mismatch");
}

GaResult ga_run(const GaConfig& cfg, const CostFn& cost, const std::vector<GeneBound>& bounds) {
    if (bounds.empty())
        throw ConfigError("ga: bounds must be non-empty");
    for (const auto& b : bounds)
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo <= b.hi))
            throw ConfigError("ga: bounds must be finite with lo <= hi");
    cfg.validate(bounds.size());

    const std::size_t dim = bounds.size();
    RandomStream rng(cfg.seed);

    auto random_genome = [&] {
        std::vector<double> g(dim);
        for (std::size_t i = 0; i < dim; ++i)
            g[i] = bounds[i].lo + rng.uniform() * (bounds[i].hi - bounds[i].lo);
        return g;
    };

    std::vector<Individual> pop;
    pop.reserve(cfg.population);
    for (const auto& seed_genome : cfg.initial_genomes) {
        if (int(pop.size()) >= cfg.population)
            break;
        Individual ind{seed_genome, kInf};
        clamp_to(bounds, ind.genes);
        pop.push_back(std::move(ind));
    }
    while (int(pop.size()) < cfg.population)
        pop.push_back(Individual{random_genome(), kInf});
    for (auto& ind : pop)
        ind.cost = penalized(cost, ind.genes);

    auto by_cost = [](const Individual& a, const Individual& b) { return a.cost < b.cost; };
    std::stable_sort(pop.begin(), pop.end(), by_cost);

    auto tournament = [&]() -> const Individual& {
        std::size_t best = rng.index(pop.size());
        for (int t = 1; t < 3; ++t) {
            const std::size_t cand = rng.index(pop.size());
            if (pop[cand].cost < pop[best].cost)
                best = cand;
        }
        return pop[best];
    };

    GaResult res;
    res.best_genome = pop.front().genes;
    res.best_cost   = pop.front().cost;
    res.history.push_back(res.best_cost);

    // Mutation scale adapts to progress: each stagnant generation shrinks it,
    // each improving generation grows it back toward the full 0.1*(hi-lo).
    double mut_scale = 1.0;

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        std::vector<Individual> next;
        next.reserve(cfg.population);
        for (int e = 0; e < cfg.elitism; ++e)
            next.push_back(pop[e]); // cost carried over unchanged

        while (int(next.size()) < cfg.population) {
            Individual c1{tournament().genes, kInf};
            Individual c2{tournament().genes, kInf};

            if (rng.uniform() < cfg.crossover_prob) {
                for (std::size_t i = 0; i < dim; ++i)
                    if (rng.uniform() < 0.5)
                        std::swap(c1.genes[i], c2.genes[i]);
            }
            for (auto* child : {&c1, &c2}) {
                for (std::size_t i = 0; i < dim; ++i) {
                    if (rng.uniform() < cfg.mutation_rate) {
                        child->genes[i] +=
                            rng.normal() * mut_scale * 0.1 * (bounds[i].hi - bounds[i].lo);
                        child->genes[i] = std::clamp(child->genes[i], bounds[i].lo, bounds[i].hi);
                    }
                }
                child->cost = penalized(cost, child->genes);
                if (int(next.size()) < cfg.population)
                    next.push_back(std::move(*child));
            }
        }

        pop = std::move(next);
        std::stable_sort(pop.begin(), pop.end(), by_cost);

        if (pop.front().cost < res.best_cost) {
            res.best_cost   = pop.front().cost;
            res.best_genome = pop.front().genes;
            mut_scale       = std::min(1.0, mut_scale * 1.05);
        } else {
            mut_scale = std::max(1e-12, mut_scale * 0.95);
        }
        res.history.push_back(res.best_cost);
        res.generations = gen + 1;

        // stop when the relative best-cost improvement across the trailing
        // window drops below stop_tol
        if (int(res.history.size()) > cfg.stall_generations) {
            const double past = res.history[res.history.size() - 1 - cfg.stall_generations];
            const double rel  = (past - res.best_cost) / std::max(std::abs(past), 1e-300);
            if (rel < cfg.stop_tol)
                break;
        }
    }
    return res;
}

} // namespace gustnav
