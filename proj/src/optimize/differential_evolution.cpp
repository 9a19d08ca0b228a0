#include "qimpute/optimize.hpp"

#include "qimpute/parallel.hpp"
#include "qimpute/random.hpp"

#include <algorithm>
#include <numbers>

namespace qimpute {

namespace {

// Evaluates thetas[0..count) (possibly in parallel) and appends them to the
// history in index order.
void evaluate_batch(const CostFunction& cost_fn, const std::vector<double>& thetas, std::size_t count,
                    unsigned threads, std::vector<Evaluation>& history) {
    std::vector<CostBreakdown> costs(count);
    parallel_for(count, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) costs[i] = cost_fn(thetas[i]);
    });
    for (std::size_t i = 0; i < count; ++i) history.push_back({history.size(), costs[i]});
}

} // namespace

// rand/1/bin with synchronous generations. In one dimension binomial
// crossover always keeps the mutant coordinate (the forced j_rand), so CR has
// no effect here. Trials outside [0, pi] are pulled halfway back from the
// parent to the violated bound. The last generation may be partial.
std::vector<Evaluation> run_differential_evolution(const CostFunction& cost_fn, const OptimizerConfig& cfg) {
    constexpr double lo = 0.0;
    constexpr double hi = std::numbers::pi;
    const auto np = static_cast<std::size_t>(cfg.de.population);
    const auto budget = static_cast<std::size_t>(cfg.budget);
    Rng rng(cfg.seed);

    std::vector<Evaluation> history;
    history.reserve(budget);
    std::vector<double> pop(np);
    for (auto& x : pop) x = rng.uniform(lo, hi);
    evaluate_batch(cost_fn, pop, np, cfg.threads, history);
    std::vector<double> fit(np);
    for (std::size_t i = 0; i < np; ++i) fit[i] = history[i].cost.total;

    std::vector<double> trial(np);
    while (history.size() < budget) {
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1, r2, r3;
            do r1 = rng.below(np); while (r1 == i);
            do r2 = rng.below(np); while (r2 == i || r2 == r1);
            do r3 = rng.below(np); while (r3 == i || r3 == r1 || r3 == r2);
            double t = pop[r1] + cfg.de.f * (pop[r2] - pop[r3]);
            if (t < lo) t = 0.5 * (pop[i] + lo);
            if (t > hi) t = 0.5 * (pop[i] + hi);
            trial[i] = t;
        }
        const std::size_t count = std::min(np, budget - history.size());
        const std::size_t first = history.size();
        evaluate_batch(cost_fn, trial, count, cfg.threads, history);
        for (std::size_t i = 0; i < count; ++i) {
            const double f = history[first + i].cost.total;
            if (f <= fit[i]) {
                pop[i] = trial[i];
                fit[i] = f;
            }
        }
    }
    return history;
}

} // namespace qimpute
