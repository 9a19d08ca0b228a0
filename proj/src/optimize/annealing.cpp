#include "qimpute/optimize.hpp"

#include "qimpute/random.hpp"

#include <cmath>
#include <numbers>

namespace qimpute {

namespace {

double reflect(double x) {
    constexpr double hi = std::numbers::pi;
    while (x < 0.0 || x > hi) x = x < 0.0 ? -x : 2.0 * hi - x;
    return x;
}

} // namespace

// Random start, Gaussian steps reflected into [0, pi], Metropolis acceptance
// and geometric cooling after every step. Infinite-cost moves are rejected.
std::vector<Evaluation> run_simulated_annealing(const CostFunction& cost_fn, const OptimizerConfig& cfg) {
    const auto budget = static_cast<std::size_t>(cfg.budget);
    Rng rng(cfg.seed);
    std::vector<Evaluation> history;
    history.reserve(budget);

    double x = rng.uniform(0.0, std::numbers::pi);
    history.push_back({0, cost_fn(x)});
    double fx = history.back().cost.total;
    double t = cfg.annealing.t0;

    while (history.size() < budget) {
        const double cand = reflect(x + cfg.annealing.step_sd * rng.normal());
        const CostBreakdown c = cost_fn(cand);
        history.push_back({history.size(), c});
        const double u = rng.uniform();
        if (std::isfinite(c.total)) {
            const double delta = c.total - fx;
            if (delta <= 0.0 || u < std::exp(-delta / t)) {
                x = cand;
                fx = c.total;
            }
        }
        t *= cfg.annealing.cooling;
    }
    return history;
}

} // namespace qimpute
