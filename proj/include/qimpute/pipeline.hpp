#pragma once

#include "qimpute/baseline.hpp"
#include "qimpute/correct.hpp"
#include "qimpute/optimize.hpp"
#include "qimpute/pca.hpp"
#include "qimpute/tabular.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qimpute {

enum class ReferenceKind { imputed, raw };

ReferenceKind parse_reference_kind(std::string_view name);
std::string_view to_string(ReferenceKind r) noexcept;

struct PipelineConfig {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> target_column = "Outcome";
    std::vector<std::string> impute_columns;
    std::vector<std::string> pca_features;   // empty: every non-target column
    CentralTendency central_tendency = CentralTendency::mean;
    std::optional<CentralTendency> stats_measure;   // defaults to central_tendency
    std::optional<std::size_t> components;          // defaults to choose_components(d)
    PenaltyConfig penalty;
    OptimizerConfig optimizer;   // seed is derived per run from the master seed
    double lambda_band = 1.0;
    double lambda_out = 1.0;
    int knn_k = 5;
    ReferenceKind reference = ReferenceKind::imputed;
    unsigned threads = 1;

    CentralTendency effective_stats_measure() const noexcept { return stats_measure.value_or(central_tendency); }
    void validate() const;   // throws ConfigError
};

// Everything upstream of the angle search; shared by all optimizers.
struct PreparedData {
    Dataset original;
    MissingMask mask;
    Dataset seeded;
    ImputationStats stats;
    PcaModel pca;
    Matrix z;
};

struct RotationCandidate {
    std::size_t index = 0;
    CostBreakdown cost;
    Dataset corrected;
    CorrectionStream stream;
    CorrectionTally tally;
};

struct Violation {
    enum class Kind { out_of_bounds, zero_value, observed_mutation };
    Kind kind;
    std::int64_t row_id;
    std::string column;
    double value;
};

std::string_view to_string(Violation::Kind k) noexcept;

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct OptimizerRun {
    OptimizerMethod method;
    std::uint64_t optimizer_seed = 0;
    std::uint64_t correction_seed = 0;
    OptimizationResult optimization;
    std::vector<RotationCandidate> candidates;   // exactly three
    Dataset final_data;
    ValidationReport validation;
    std::vector<StageTiming> timings;
};

struct PipelineResult {
    PreparedData prepared;
    OptimizerRun run;
    std::vector<StageTiming> timings;   // prepare stages followed by the run's
};

std::uint64_t optimizer_seed(std::uint64_t master, OptimizerMethod m) noexcept;
std::uint64_t correction_seed(std::uint64_t master, OptimizerMethod m) noexcept;

// Mask, seed-impute, stats and PCA projection. Errors carry the stage name.
PreparedData prepare(const Dataset& d, const PipelineConfig& cfg, std::vector<StageTiming>* timings = nullptr);

// Angle search with the given method, three corrected candidates, their
// average superimposed on the original at masked cells, and validation.
OptimizerRun run_optimizer(const PreparedData& p, const PipelineConfig& cfg, OptimizerMethod method);

PipelineResult run(const Dataset& d, const PipelineConfig& cfg);

// Cell-wise mean of three aligned tables at masked cells; other cells are
// copied from c1.
Dataset average_candidates(const Dataset& c1, const Dataset& c2, const Dataset& c3, const MissingMask& mask);

// Original table with averaged, re-clamped candidate values at masked cells.
Dataset superimpose(const Dataset& original, const std::vector<RotationCandidate>& candidates,
                    const MissingMask& mask, const ImputationStats& stats);

ValidationReport validate_final(const Dataset& final_data, const Dataset& original, const ImputationStats& stats,
                                const MissingMask& mask);

// Reference table for metrics: seed-imputed or raw, per cfg.reference.
const Dataset& reference_dataset(const PreparedData& p, const PipelineConfig& cfg) noexcept;

} // namespace qimpute
