#include "qimpute/pipeline.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/qrotate.hpp"
#include "qimpute/random.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <set>

namespace qimpute {

namespace {

// Runs fn, prefixing any error with the stage name while keeping its category.
template <class Fn>
auto in_stage(const char* stage, std::vector<StageTiming>* timings, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
        if (timings)
            timings->push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    };
    const std::string prefix = std::string(stage) + ": ";
    auto tag = [&](const char* what) {
        return std::string_view(what).starts_with(prefix) ? std::string(what) : prefix + what;
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto out = fn();
            record();
            return out;
        }
    } catch (const ConfigError& e) {
        throw ConfigError(tag(e.what()));
    } catch (const DataError& e) {
        throw DataError(tag(e.what()));
    } catch (const OptimizationError& e) {
        throw OptimizationError(tag(e.what()));
    } catch (const RotationError& e) {
        throw RotationError(tag(e.what()));
    } catch (const Error& e) {
        throw Error(tag(e.what()));
    }
}

} // namespace

ReferenceKind parse_reference_kind(std::string_view name) {
    if (name == "imputed") return ReferenceKind::imputed;
    if (name == "raw") return ReferenceKind::raw;
    throw ConfigError("invalid reference '" + std::string(name) + "' (expected imputed or raw)");
}

std::string_view to_string(ReferenceKind r) noexcept { return r == ReferenceKind::raw ? "raw" : "imputed"; }

std::string_view to_string(Violation::Kind k) noexcept {
    switch (k) {
    case Violation::Kind::out_of_bounds: return "out_of_bounds";
    case Violation::Kind::zero_value: return "zero_value";
    case Violation::Kind::observed_mutation: return "observed_mutation";
    }
    return "out_of_bounds";
}

void PipelineConfig::validate() const {
    if (!seed) throw ConfigError("seed required");
    if (impute_columns.empty()) throw ConfigError("impute_columns must not be empty");
    if (!pca_features.empty()) {
        const std::set<std::string> pca(pca_features.begin(), pca_features.end());
        for (const auto& c : impute_columns)
            if (!pca.contains(c)) throw ConfigError("impute column '" + c + "' is not among pca_features");
    }
    if (components && *components == 0) throw ConfigError("components must be positive");
    if (knn_k <= 0) throw ConfigError("knn_k must be positive");
    if (!(lambda_band >= 0.0) || !(lambda_out >= 0.0)) throw ConfigError("penalty weights must be non-negative");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    penalty.validate();
    optimizer.validate();
}

std::uint64_t optimizer_seed(std::uint64_t master, OptimizerMethod m) noexcept {
    return derive_seed(master, std::string("optimizer:") + std::string(to_string(m)));
}

std::uint64_t correction_seed(std::uint64_t master, OptimizerMethod m) noexcept {
    return derive_seed(master, std::string("correction:") + std::string(to_string(m)));
}

PreparedData prepare(const Dataset& d, const PipelineConfig& cfg, std::vector<StageTiming>* timings) {
    in_stage("config", nullptr, [&] { cfg.validate(); });
    PreparedData p;
    p.original = d;
    p.mask = in_stage("mask", timings, [&] { return derive_mask(d, cfg.impute_columns); });
    p.seeded = in_stage("seed", timings, [&] { return impute_central(d, p.mask, cfg.central_tendency); });
    p.stats = in_stage("stats", timings,
                       [&] { return compute_stats(p.seeded, d, p.mask, cfg.effective_stats_measure()); });
    in_stage("pca", timings, [&] {
        const auto features = cfg.pca_features.empty() ? d.feature_columns() : cfg.pca_features;
        if (d.target_column() &&
            std::find(features.begin(), features.end(), *d.target_column()) != features.end())
            throw ConfigError("target column '" + *d.target_column() + "' cannot be a PCA feature");
        const std::size_t k = cfg.components.value_or(choose_components(features.size()));
        if (!is_power_of_two(k))
            throw ConfigError("component count " + std::to_string(k) + " is not a power of two");
        p.pca = fit(p.seeded, features, k);
        p.z = project(p.pca, p.seeded, cfg.threads);
    });
    return p;
}

OptimizerRun run_optimizer(const PreparedData& p, const PipelineConfig& cfg, OptimizerMethod method) {
    OptimizerRun out;
    out.method = method;
    out.optimizer_seed = optimizer_seed(*cfg.seed, method);
    out.correction_seed = correction_seed(*cfg.seed, method);

    OptimizerConfig oc = cfg.optimizer;
    oc.method = method;
    oc.seed = out.optimizer_seed;
    // DE spreads a generation over the workers; the others parallelize rows
    const bool batch_parallel = method == OptimizerMethod::differential_evolution && cfg.threads > 1;
    oc.threads = batch_parallel ? cfg.threads : 1;
    const unsigned row_threads = batch_parallel ? 1 : cfg.threads;

    const RotationCost cost(p.z, p.pca, p.stats, p.mask, p.original, cfg.penalty, cfg.lambda_band, cfg.lambda_out,
                            row_threads);
    out.optimization = in_stage("optimize", &out.timings, [&] { return minimize(std::cref(cost), oc); });

    in_stage("candidates", &out.timings, [&] {
        for (std::size_t i = 0; i < out.optimization.top.angles.size(); ++i) {
            RotationCandidate c;
            c.index = i;
            c.cost = out.optimization.top.angles[i];
            c.stream = {out.correction_seed, i};
            const Matrix rotated = rotate_table(p.z, c.cost.theta, cfg.threads, p.original.ids());
            const Dataset xhat = reconstruct(p.pca, rotated, p.seeded, cfg.threads);
            c.corrected = correct_reconstruction(xhat, p.stats, p.mask, cfg.penalty, c.stream, &c.tally);
            out.candidates.push_back(std::move(c));
        }
    });
    out.final_data = in_stage("superimpose", &out.timings,
                              [&] { return superimpose(p.original, out.candidates, p.mask, p.stats); });
    out.validation = in_stage("validate", &out.timings,
                              [&] { return validate_final(out.final_data, p.original, p.stats, p.mask); });
    return out;
}

PipelineResult run(const Dataset& d, const PipelineConfig& cfg) {
    PipelineResult r;
    r.prepared = prepare(d, cfg, &r.timings);
    r.run = run_optimizer(r.prepared, cfg, cfg.optimizer.method);
    r.timings.insert(r.timings.end(), r.run.timings.begin(), r.run.timings.end());
    return r;
}

Dataset average_candidates(const Dataset& c1, const Dataset& c2, const Dataset& c3, const MissingMask& mask) {
    for (const Dataset* c : {&c2, &c3})
        if (c->rows() != c1.rows() || c->cols() != c1.cols()) throw DataError("candidate tables differ in shape");
    if (mask.rows() != c1.rows() || mask.cols() != c1.cols()) throw DataError("mask shape does not match candidates");
    Dataset out = c1;
    for (std::size_t r = 0; r < c1.rows(); ++r)
        for (std::size_t c : mask.impute_indices())
            if (mask.missing(r, c)) out(r, c) = (c1(r, c) + c2(r, c) + c3(r, c)) / 3.0;
    return out;
}

Dataset superimpose(const Dataset& original, const std::vector<RotationCandidate>& candidates,
                    const MissingMask& mask, const ImputationStats& stats) {
    if (candidates.size() != 3)
        throw DataError("expected three candidates, got " + std::to_string(candidates.size()));
    const Dataset avg =
        average_candidates(candidates[0].corrected, candidates[1].corrected, candidates[2].corrected, mask);
    Dataset out = original;
    for (std::size_t r = 0; r < original.rows(); ++r) {
        for (std::size_t c : mask.impute_indices()) {
            if (!mask.missing(r, c)) continue;
            const StatsRecord* rec = stats.find(r, c);
            if (!rec) throw DataError("no stats record for masked cell (row " + std::to_string(original.ids()[r]) + ")");
            out(r, c) = clamp_bounds(avg(r, c), rec->lower, rec->upper);
        }
    }
    return out;
}

ValidationReport validate_final(const Dataset& final_data, const Dataset& original, const ImputationStats& stats,
                                const MissingMask& mask) {
    if (final_data.rows() != original.rows() || final_data.cols() != original.cols())
        throw DataError("final and original datasets differ in shape");
    ValidationReport rep;
    const auto& names = original.column_names();
    std::vector<bool> impute(original.cols(), false);
    for (std::size_t c : mask.impute_indices()) impute[c] = true;
    for (std::size_t r = 0; r < original.rows(); ++r) {
        const auto id = original.ids()[r];
        for (std::size_t c = 0; c < original.cols(); ++c) {
            const double v = final_data(r, c);
            // at most one violation per cell, the most specific one
            if (!mask.missing(r, c)) {
                if (std::bit_cast<std::uint64_t>(v) != std::bit_cast<std::uint64_t>(original(r, c)))
                    rep.violations.push_back({Violation::Kind::observed_mutation, id, names[c], v});
                else if (impute[c] && v == 0.0)
                    rep.violations.push_back({Violation::Kind::zero_value, id, names[c], v});
                continue;
            }
            const StatsRecord* rec = stats.find(r, c);
            if (v == 0.0)
                rep.violations.push_back({Violation::Kind::zero_value, id, names[c], v});
            else if (!rec || v < rec->lower || v > rec->upper)
                rep.violations.push_back({Violation::Kind::out_of_bounds, id, names[c], v});
        }
    }
    return rep;
}

const Dataset& reference_dataset(const PreparedData& p, const PipelineConfig& cfg) noexcept {
    return cfg.reference == ReferenceKind::raw ? p.original : p.seeded;
}

} // namespace qimpute
