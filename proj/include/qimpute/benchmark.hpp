#pragma once

#include "qimpute/metrics.hpp"
#include "qimpute/pipeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace qimpute {

struct BenchmarkResult {
    PreparedData prepared;
    std::map<std::string, Dataset> baselines;   // KNN, Mean, Median, Mode
    std::vector<OptimizerRun> runs;             // in the order requested
    std::vector<std::string> method_order;      // report columns
    MetricReport report;
    double seconds = 0.0;
};

// Classical baselines plus the rotation pipeline under each optimizer, three
// candidate columns per optimizer (DE_1..3 and so on), all measured against
// the configured reference over the impute columns.
BenchmarkResult run_benchmark(const Dataset& d, const PipelineConfig& cfg, const std::vector<OptimizerMethod>& optimizers);

// Report columns in order, with the datasets they refer to.
std::vector<NamedDataset> benchmark_columns(const BenchmarkResult& b);

} // namespace qimpute
