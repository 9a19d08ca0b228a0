#include "qimpute/benchmark.hpp"

#include <chrono>

namespace qimpute {

BenchmarkResult run_benchmark(const Dataset& d, const PipelineConfig& cfg,
                              const std::vector<OptimizerMethod>& optimizers) {
    const auto start = std::chrono::steady_clock::now();
    BenchmarkResult b;
    b.prepared = prepare(d, cfg);
    const auto& p = b.prepared;
    b.baselines.emplace("KNN", impute_knn(p.original, p.mask, cfg.knn_k));
    b.baselines.emplace("Mean", impute_central(p.original, p.mask, CentralTendency::mean));
    b.baselines.emplace("Median", impute_central(p.original, p.mask, CentralTendency::median));
    b.baselines.emplace("Mode", impute_central(p.original, p.mask, CentralTendency::mode));
    b.method_order = {"KNN", "Mean", "Median", "Mode"};
    for (auto m : optimizers) {
        b.runs.push_back(run_optimizer(p, cfg, m));
        for (int i = 1; i <= 3; ++i) b.method_order.push_back(std::string(column_label(m)) + "_" + std::to_string(i));
    }
    b.report = build_report(reference_dataset(p, cfg), benchmark_columns(b), cfg.impute_columns, cfg.threads);
    b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return b;
}

std::vector<NamedDataset> benchmark_columns(const BenchmarkResult& b) {
    std::vector<NamedDataset> cols;
    for (const char* name : {"KNN", "Mean", "Median", "Mode"}) cols.push_back({name, &b.baselines.at(name)});
    for (const auto& run : b.runs)
        for (const auto& c : run.candidates)
            cols.push_back({std::string(column_label(run.method)) + "_" + std::to_string(c.index + 1), &c.corrected});
    return cols;
}

} // namespace qimpute
