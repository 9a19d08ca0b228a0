#include "qimpute/optimize.hpp"

#include "qimpute/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

namespace qimpute {

OptimizerMethod parse_optimizer_method(std::string_view name) {
    if (name == "de" || name == "differential_evolution") return OptimizerMethod::differential_evolution;
    if (name == "cobyla") return OptimizerMethod::cobyla;
    if (name == "annealing" || name == "simulated_annealing") return OptimizerMethod::simulated_annealing;
    throw ConfigError("invalid optimizer '" + std::string(name) + "' (expected de, cobyla or annealing)");
}

std::string_view to_string(OptimizerMethod m) noexcept {
    switch (m) {
    case OptimizerMethod::differential_evolution: return "differential_evolution";
    case OptimizerMethod::cobyla: return "cobyla";
    case OptimizerMethod::simulated_annealing: return "simulated_annealing";
    }
    return "differential_evolution";
}

std::string_view column_label(OptimizerMethod m) noexcept {
    switch (m) {
    case OptimizerMethod::differential_evolution: return "DE";
    case OptimizerMethod::cobyla: return "COBYLA";
    case OptimizerMethod::simulated_annealing: return "Annealing";
    }
    return "DE";
}

void OptimizerConfig::validate() const {
    if (budget < 1) throw ConfigError("optimizer budget must be positive");
    if (method == OptimizerMethod::differential_evolution) {
        if (de.population < 4) throw ConfigError("DE population must be at least 4");
        if (budget < de.population)
            throw ConfigError("optimizer budget " + std::to_string(budget) + " is below the DE population " +
                              std::to_string(de.population));
        if (!(de.f > 0.0 && de.f <= 2.0)) throw ConfigError("DE F must be in (0, 2]");
        if (!(de.cr >= 0.0 && de.cr <= 1.0)) throw ConfigError("DE CR must be in [0, 1]");
    }
    if (method == OptimizerMethod::simulated_annealing) {
        if (!(annealing.t0 > 0.0)) throw ConfigError("annealing t0 must be positive");
        if (!(annealing.cooling > 0.0 && annealing.cooling < 1.0)) throw ConfigError("annealing cooling must be in (0, 1)");
        if (!(annealing.step_sd > 0.0)) throw ConfigError("annealing step_sd must be positive");
    }
    if (method == OptimizerMethod::cobyla) {
        if (cobyla.restarts < 1) throw ConfigError("cobyla restarts must be positive");
        if (!(cobyla.rho_begin > cobyla.rho_end && cobyla.rho_end > 0.0))
            throw ConfigError("cobyla radii must satisfy rho_begin > rho_end > 0");
        if (budget < cobyla.restarts) throw ConfigError("optimizer budget is below the cobyla restart count");
    }
}

CostFunction scalar_cost(std::function<double(double)> f) {
    return [f = std::move(f)](double theta) {
        CostBreakdown c;
        c.theta = theta;
        c.total = f(theta);
        c.deviation = c.total;
        return c;
    };
}

TopAngles select_top_angles(const std::vector<Evaluation>& history, std::size_t count, double separation) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (std::isfinite(history[i].cost.total)) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return history[a].cost.total < history[b].cost.total; });
    TopAngles top;
    for (std::size_t i : order) {
        const double theta = history[i].cost.theta;
        const bool clear = std::all_of(top.angles.begin(), top.angles.end(),
                                       [&](const CostBreakdown& c) { return std::fabs(c.theta - theta) >= separation; });
        if (!clear) continue;
        top.angles.push_back(history[i].cost);
        if (top.angles.size() == count) return top;
    }
    throw OptimizationError("insufficient distinct minima: found " + std::to_string(top.angles.size()) + " of " +
                            std::to_string(count) + " angles separated by " + std::to_string(separation) +
                            " rad in " + std::to_string(history.size()) + " evaluations");
}

OptimizationResult minimize(const CostFunction& cost_fn, const OptimizerConfig& cfg) {
    cfg.validate();
    OptimizationResult res;
    res.method = cfg.method;
    switch (cfg.method) {
    case OptimizerMethod::differential_evolution: res.history = run_differential_evolution(cost_fn, cfg); break;
    case OptimizerMethod::cobyla: res.history = run_cobyla(cost_fn, cfg); break;
    case OptimizerMethod::simulated_annealing: res.history = run_simulated_annealing(cost_fn, cfg); break;
    }
    res.top = select_top_angles(res.history);
    return res;
}

void write_trace_header(std::ostream& out) {
    out << "method,eval,theta,deviation,band_penalty,bound_penalty,total\n";
}

void write_trace(std::ostream& out, std::string_view method, const std::vector<Evaluation>& history) {
    auto real = [](double v) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    };
    for (const auto& e : history)
        out << method << ',' << e.index << ',' << real(e.cost.theta) << ',' << real(e.cost.deviation) << ','
            << real(e.cost.band_penalty) << ',' << real(e.cost.bound_penalty) << ',' << real(e.cost.total) << '\n';
}

} // namespace qimpute
