#pragma once

#include "qimpute/baseline.hpp"
#include "qimpute/correct.hpp"
#include "qimpute/matrix.hpp"
#include "qimpute/pca.hpp"
#include "qimpute/tabular.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qimpute {

struct CostBreakdown {
    double theta = 0.0;
    double deviation = 0.0;
    double band_penalty = 0.0;
    double bound_penalty = 0.0;
    double total = 0.0;
};

enum class OptimizerMethod { differential_evolution, cobyla, simulated_annealing };

// Accepts de / cobyla / annealing and the long names.
OptimizerMethod parse_optimizer_method(std::string_view name);
std::string_view to_string(OptimizerMethod m) noexcept;      // long name
std::string_view column_label(OptimizerMethod m) noexcept;   // DE, COBYLA, Annealing

struct DeSettings {
    int population = 15;
    double f = 0.8;
    double cr = 0.9;
};

struct AnnealingSettings {
    double t0 = 1.0;
    double cooling = 0.95;
    double step_sd = 0.15;
};

struct CobylaSettings {
    int restarts = 5;
    double rho_begin = 0.3;
    double rho_end = 1e-4;
};

struct OptimizerConfig {
    OptimizerMethod method = OptimizerMethod::differential_evolution;
    int budget = 200;
    std::uint64_t seed = 0;
    unsigned threads = 1;   // parallel evaluations within a DE generation
    DeSettings de;
    AnnealingSettings annealing;
    CobylaSettings cobyla;

    void validate() const;   // throws ConfigError
};

using CostFunction = std::function<CostBreakdown(double theta)>;

// Wraps a plain objective; the result carries only theta and total.
CostFunction scalar_cost(std::function<double(double)> f);

struct Evaluation {
    std::size_t index = 0;
    CostBreakdown cost;
};

struct TopAngles {
    std::vector<CostBreakdown> angles;   // ascending total, pairwise separated
};

struct OptimizationResult {
    OptimizerMethod method = OptimizerMethod::differential_evolution;
    std::vector<Evaluation> history;
    TopAngles top;
};

inline constexpr double kAngleSeparation = 0.05;

// Greedy pick over the history by ascending cost (ties by evaluation order),
// skipping non-finite costs and angles closer than `separation` to one already
// taken. Throws OptimizationError "insufficient distinct minima".
TopAngles select_top_angles(const std::vector<Evaluation>& history, std::size_t count = 3,
                            double separation = kAngleSeparation);

// Runs the configured method over [0, pi] for at most cfg.budget evaluations.
OptimizationResult minimize(const CostFunction& cost_fn, const OptimizerConfig& cfg);

std::vector<Evaluation> run_differential_evolution(const CostFunction& cost_fn, const OptimizerConfig& cfg);
std::vector<Evaluation> run_simulated_annealing(const CostFunction& cost_fn, const OptimizerConfig& cfg);
std::vector<Evaluation> run_cobyla(const CostFunction& cost_fn, const OptimizerConfig& cfg);

// method,eval,theta,deviation,band_penalty,bound_penalty,total
void write_trace_header(std::ostream& out);
void write_trace(std::ostream& out, std::string_view method, const std::vector<Evaluation>& history);

// Everything the rotation cost needs, prepared once per pipeline run.
class RotationCost {
public:
    // `seeded` is the central-tendency-imputed table that was projected into z.
    RotationCost(const Matrix& z, const PcaModel& pca, const ImputationStats& stats, const MissingMask& mask,
                 const Dataset& original, PenaltyConfig penalty, double lambda_band = 1.0, double lambda_out = 1.0,
                 unsigned threads = 1);

    // Penalties are measured on the reconstruction before correction. The
    // deviation covers observed cells only, which correction never touches,
    // so the cost does not depend on the correction draws. A degenerate
    // rotation yields an infinite total.
    CostBreakdown operator()(double theta) const;

    std::size_t observed_cells() const noexcept { return observed_; }
    std::size_t masked_cells() const noexcept { return masked_.size(); }
    const std::vector<double>& column_scale() const noexcept { return scale_; }

private:
    struct MaskedCell {
        std::size_t row, feature;
        double center, lower, upper;
    };

    Matrix z_;
    PcaModel pca_;
    PenaltyConfig penalty_;
    double lambda_band_, lambda_out_;
    unsigned threads_;
    std::vector<std::int64_t> ids_;
    Matrix observed_block_;                 // n x d original feature values
    std::vector<std::uint8_t> skip_;        // n x d, 1 at masked cells
    std::vector<double> scale_;             // 1 / sd per feature
    std::size_t observed_ = 0;
    std::vector<MaskedCell> masked_;
};

} // namespace qimpute
