#include "qimpute/optimize.hpp"

#include <numbers>

namespace qimpute {

// One-dimensional linear-model trust region with multistart. From the current
// point a probe at distance rho fixes the slope of the linear model; the model
// step goes rho downhill. A failed step halves rho. Restarts sit at the
// midpoints of equal cells of [0, pi] and split the remaining budget evenly.
std::vector<Evaluation> run_cobyla(const CostFunction& cost_fn, const OptimizerConfig& cfg) {
    constexpr double hi = std::numbers::pi;
    const auto budget = static_cast<std::size_t>(cfg.budget);
    const int restarts = cfg.cobyla.restarts;
    std::vector<Evaluation> history;
    history.reserve(budget);

    auto eval = [&](double theta) {
        history.push_back({history.size(), cost_fn(theta)});
        return history.back().cost.total;
    };

    for (int s = 0; s < restarts; ++s) {
        const std::size_t share = (budget - history.size()) / static_cast<std::size_t>(restarts - s);
        const std::size_t stop = history.size() + share;
        if (share == 0) continue;

        double x = (s + 0.5) * hi / restarts;
        double fx = eval(x);
        double rho = cfg.cobyla.rho_begin;
        while (rho >= cfg.cobyla.rho_end && history.size() < stop) {
            const double dir = x + rho <= hi ? 1.0 : -1.0;
            const double probe = x + dir * rho;
            const double fp = eval(probe);
            if (fp < fx) {
                x = probe;
                fx = fp;
                continue;
            }
            // slope (fp - fx) / (dir * rho) is uphill along dir
            const double step = x - dir * rho;
            if (step < 0.0 || step > hi || history.size() >= stop) {
                rho *= 0.5;
                continue;
            }
            const double fs = eval(step);
            if (fs < fx) {
                x = step;
                fx = fs;
            } else {
                rho *= 0.5;
            }
        }
    }
    return history;
}

} // namespace qimpute
