#include "qimpute/cli.hpp"

#include "qimpute/benchmark.hpp"
#include "qimpute/config.hpp"
#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"
#include "qimpute/metrics.hpp"
#include "qimpute/pipeline.hpp"

#include "oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <unistd.h>
#include <vector>

namespace qimpute {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonFlags {
    std::string config;
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::string optimizer;
    std::string measure;
    std::optional<unsigned> threads;
    bool trace = false;
};

// Writes artifacts into a sibling temp directory and moves them into place
// only when the command succeeds.
class Staging {
public:
    explicit Staging(fs::path target) : target_(std::move(target)) {
        if (target_.filename().empty()) target_ = target_.parent_path();
        const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
        tmp_ = parent / ("." + target_.filename().string() + ".tmp-" + std::to_string(::getpid()));
        std::error_code ec;
        fs::remove_all(tmp_, ec);
        if (!fs::create_directories(tmp_, ec) || ec)
            throw DataError("cannot create output staging directory '" + tmp_.string() + "': " + ec.message());
    }
    ~Staging() {
        std::error_code ec;
        if (!committed_) fs::remove_all(tmp_, ec);
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;

    fs::path path(const std::string& name) const { return tmp_ / name; }
    fs::path final_path(const std::string& name) const { return target_ / name; }

    void commit() {
        std::error_code ec;
        if (!fs::exists(target_)) {
            fs::rename(tmp_, target_, ec);
            if (ec) throw DataError("cannot move outputs into '" + target_.string() + "': " + ec.message());
        } else {
            if (!fs::is_directory(target_)) throw DataError("output path '" + target_.string() + "' is not a directory");
            for (const auto& entry : fs::directory_iterator(tmp_)) {
                fs::rename(entry.path(), target_ / entry.path().filename(), ec);
                if (ec) throw DataError("cannot move '" + entry.path().string() + "': " + ec.message());
            }
            fs::remove_all(tmp_, ec);
        }
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path tmp_;
    bool committed_ = false;
};

PipelineConfig effective_config(const CommonFlags& f) {
    PipelineConfig cfg = load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (!f.measure.empty()) {
        cfg.central_tendency = parse_central_tendency(f.measure);
        cfg.stats_measure.reset();
    }
    if (f.threads) cfg.threads = *f.threads;
    if (!f.optimizer.empty() && f.optimizer != "all") cfg.optimizer.method = parse_optimizer_method(f.optimizer);
    cfg.validate();
    return cfg;
}

std::vector<OptimizerMethod> requested_optimizers(const CommonFlags& f, const PipelineConfig& cfg) {
    if (f.optimizer == "all")
        return {OptimizerMethod::differential_evolution, OptimizerMethod::cobyla, OptimizerMethod::simulated_annealing};
    return {cfg.optimizer.method};
}

json cost_json(const CostBreakdown& c) {
    return {{"theta", c.theta},
            {"deviation", c.deviation},
            {"band_penalty", c.band_penalty},
            {"bound_penalty", c.bound_penalty},
            {"total", c.total}};
}

json timings_json(const std::vector<StageTiming>& t) {
    json out = json::array();
    for (const auto& s : t) out.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
    return out;
}

json run_json(const OptimizerRun& r) {
    json cands = json::array();
    for (const auto& c : r.candidates)
        cands.push_back({{"index", c.index + 1},
                         {"cost", cost_json(c.cost)},
                         {"correction_stream", {{"seed", c.stream.seed}, {"theta_index", c.stream.theta_index}}},
                         {"masked", c.tally.masked},
                         {"out_of_bounds", c.tally.out_of_bounds},
                         {"in_band", c.tally.in_band}});
    return {{"method", to_string(r.method)},
            {"optimizer_seed", r.optimizer_seed},
            {"correction_seed", r.correction_seed},
            {"evaluations", r.optimization.history.size()},
            {"candidates", cands},
            {"timings", timings_json(r.timings)},
            {"validation_violations", r.validation.violations.size()}};
}

json base_manifest(const char* command, const PipelineConfig& cfg, const PreparedData& p, const std::string& input) {
    json counts = json::object();
    for (std::size_t i = 0; i < p.mask.impute_columns().size(); ++i)
        counts[p.mask.impute_columns()[i]] = p.mask.count(p.mask.impute_indices()[i]);
    return {{"tool", "qimpute"},
            {"version", kVersion},
            {"command", command},
            {"input", input},
            {"config", config_to_json(cfg)},
            {"master_seed", *cfg.seed},
            {"kernel_isa", kernels::isa_name(kernels::active().isa)},
            {"rows", p.original.rows()},
            {"mask_counts", counts},
            {"pca", {{"features", p.pca.feature_names}, {"components", p.pca.k()}, {"eigenvalues", p.pca.eigenvalues}}},
            {"reference", to_string(cfg.reference)}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_input(const std::string& path, const PipelineConfig& cfg) {
    return load_csv(path, cfg.target_column);
}

void log_run(std::ostream& err, const OptimizerRun& r) {
    err << "  " << to_string(r.method) << ": " << r.optimization.history.size() << " evaluations, angles";
    for (const auto& c : r.candidates) err << ' ' << c.cost.theta << " (" << c.cost.total << ')';
    err << '\n';
}

int cmd_impute(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    if (f.optimizer == "all") throw ConfigError("impute runs one optimizer; use benchmark for --optimizer all");
    const PipelineConfig cfg = effective_config(f);
    const Dataset d = load_input(f.input, cfg);
    Staging stage(f.output);

    const PipelineResult res = run(d, cfg);
    log_run(err, res.run);

    std::vector<std::string> artifacts = {"imputed.csv"};
    save_csv(res.run.final_data, stage.path("imputed.csv"));
    for (const auto& c : res.run.candidates) {
        const std::string name = "imputed_angle" + std::to_string(c.index + 1) + ".csv";
        save_csv(c.corrected, stage.path(name));
        artifacts.push_back(name);
    }
    save_stats_csv(res.prepared.stats, stage.path("stats.csv"));
    artifacts.push_back("stats.csv");
    if (f.trace) {
        std::ofstream t(stage.path("trace.csv"));
        write_trace_header(t);
        write_trace(t, to_string(res.run.method), res.run.optimization.history);
        if (!t) throw DataError("cannot write trace");
        artifacts.push_back("trace.csv");
    }

    json violations = json::array();
    for (const auto& v : res.run.validation.violations)
        violations.push_back({{"kind", to_string(v.kind)}, {"row_id", v.row_id}, {"column", v.column}, {"value", v.value}});

    json m = base_manifest("impute", cfg, res.prepared, f.input);
    m["run"] = run_json(res.run);
    m["timings"] = timings_json(res.timings);
    m["validation"] = {{"ok", res.run.validation.ok()}, {"violations", violations}};
    artifacts.push_back("manifest.json");
    json paths = json::array();
    for (const auto& a : artifacts) paths.push_back(stage.final_path(a).string());
    m["artifacts"] = paths;
    write_json(stage.path("manifest.json"), m);

    if (!res.run.validation.ok()) {
        err << "validation failed with " << res.run.validation.violations.size() << " violation(s); first: "
            << to_string(res.run.validation.violations.front().kind) << " at row "
            << res.run.validation.violations.front().row_id << ", column "
            << res.run.validation.violations.front().column << '\n';
        return 2;
    }
    stage.commit();
    out << "wrote " << artifacts.size() << " files to " << f.output << '\n';
    return 0;
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return s;
}

void write_kde_files(const Staging& stage, const std::vector<std::string>& features,
                     const std::vector<NamedDataset>& columns, std::vector<std::string>& artifacts) {
    for (const auto& f : features) {
        for (const auto& m : columns) {
            const std::string name = "kde_" + safe_name(f) + "_" + safe_name(m.name) + ".csv";
            write_kde_csv(gaussian_kde(m.data->column(m.data->column_index(f))), stage.path(name));
            artifacts.push_back(name);
        }
    }
}

int cmd_benchmark(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const PipelineConfig cfg = effective_config(f);
    const Dataset d = load_input(f.input, cfg);
    Staging stage(f.output);

    const auto optimizers = requested_optimizers(f, cfg);
    const BenchmarkResult b = run_benchmark(d, cfg, optimizers);
    for (const auto& r : b.runs) log_run(err, r);

    std::vector<std::string> artifacts;
    for (const auto& p : write_report_csvs(b.report, stage.path("")))
        artifacts.push_back(p.filename().string());
    auto columns = benchmark_columns(b);
    columns.insert(columns.begin(), NamedDataset{"Reference", &reference_dataset(b.prepared, cfg)});
    write_kde_files(stage, cfg.impute_columns, columns, artifacts);
    if (f.trace) {
        std::ofstream t(stage.path("trace.csv"));
        write_trace_header(t);
        for (const auto& r : b.runs) write_trace(t, to_string(r.method), r.optimization.history);
        if (!t) throw DataError("cannot write trace");
        artifacts.push_back("trace.csv");
    }

    json m = base_manifest("benchmark", cfg, b.prepared, f.input);
    json runs = json::array();
    bool valid = true;
    for (const auto& r : b.runs) {
        runs.push_back(run_json(r));
        valid = valid && r.validation.ok();
    }
    m["runs"] = runs;
    m["methods"] = b.method_order;
    m["seconds"] = b.seconds;
    artifacts.push_back("manifest.json");
    json paths = json::array();
    for (const auto& a : artifacts) paths.push_back(stage.final_path(a).string());
    m["artifacts"] = paths;
    write_json(stage.path("manifest.json"), m);
    if (!valid) {
        err << "validation of a final dataset failed\n";
        return 2;
    }
    stage.commit();
    out << "benchmark: " << b.method_order.size() << " methods x " << cfg.impute_columns.size() << " features in "
        << b.seconds << " s, wrote " << artifacts.size() << " files to " << f.output << '\n';
    return 0;
}

int cmd_evaluate(const std::string& config, const std::string& input, const std::vector<std::string>& methods,
                 const std::string& output, bool kde, std::ostream& out) {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
    const Dataset reference = load_csv(input, cfg.target_column);
    std::vector<std::string> features = cfg.impute_columns.empty() ? reference.feature_columns() : cfg.impute_columns;

    std::vector<std::pair<std::string, Dataset>> loaded;
    for (const auto& arg : methods) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
            throw ConfigError("--method expects name=path, got '" + arg + "'");
        loaded.emplace_back(arg.substr(0, eq), load_csv(arg.substr(eq + 1), cfg.target_column));
    }
    std::vector<NamedDataset> named;
    for (const auto& [name, data] : loaded) named.push_back({name, &data});

    Staging stage(output);
    const MetricReport report = build_report(reference, named, features, cfg.threads);
    std::vector<std::string> artifacts;
    for (const auto& p : write_report_csvs(report, stage.path(""))) artifacts.push_back(p.filename().string());
    if (kde) {
        named.insert(named.begin(), NamedDataset{"Reference", &reference});
        write_kde_files(stage, features, named, artifacts);
    }
    stage.commit();
    out << "wrote " << artifacts.size() << " files to " << output << '\n';
    return 0;
}

int cmd_oracle(const std::string& input, const std::string& output, std::ostream& out) {
    try {
        oracle::write_fixtures(input, output);
    } catch (const std::exception& e) {
        throw DataError(std::string("oracle: ") + e.what());
    }
    out << "fixtures written to " << output << '\n';
    return 0;
}

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "Pipeline configuration (JSON)")->required();
    app->add_option("--input", f.input, "Input CSV")->required();
    app->add_option("--output", f.output, "Output directory")->required();
    app->add_option("--seed", f.seed, "Master seed (overrides config)");
    app->add_option("--optimizer", f.optimizer, "de, cobyla, annealing or all")
        ->check(CLI::IsMember({"de", "cobyla", "annealing", "all"}));
    app->add_option("--measure", f.measure, "Central tendency for seeding and bounds")
        ->check(CLI::IsMember({"mean", "median", "mode"}));
    app->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--trace", f.trace, "Write trace.csv with every cost evaluation");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rotation-based imputation of zero-coded missing values", "qimpute"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags impute_flags, bench_flags;
    auto* impute = app.add_subcommand("impute", "Run the imputation pipeline");
    add_common(impute, impute_flags);
    auto* bench = app.add_subcommand("benchmark", "Baselines plus every optimizer, with metric tables");
    add_common(bench, bench_flags);
    bench_flags.optimizer = "all";

    std::string eval_config, eval_input, eval_output;
    std::vector<std::string> eval_methods;
    bool eval_kde = false;
    auto* evaluate = app.add_subcommand("evaluate", "Metrics of saved datasets against a reference");
    evaluate->add_option("--config", eval_config, "Configuration providing target and feature columns");
    evaluate->add_option("--input", eval_input, "Reference CSV")->required();
    evaluate->add_option("--method", eval_methods, "name=path of a dataset to compare (repeatable)")->required();
    evaluate->add_option("--output", eval_output, "Output directory")->required();
    evaluate->add_flag("--kde", eval_kde, "Also write KDE curves");

    std::string oracle_input, oracle_output;
    auto* oracle_cmd = app.add_subcommand("oracle", "Regenerate reference fixtures with the independent oracles");
    oracle_cmd->add_option("--input", oracle_input, "Diabetes CSV")->required();
    oracle_cmd->add_option("--output", oracle_output, "Fixture directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*impute) return cmd_impute(impute_flags, out, err);
        if (*bench) return cmd_benchmark(bench_flags, out, err);
        if (*evaluate) return cmd_evaluate(eval_config, eval_input, eval_methods, eval_output, eval_kde, out);
        if (*oracle_cmd) return cmd_oracle(oracle_input, oracle_output, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const OptimizationError& e) {
        err << "optimization error: " << e.what() << '\n';
        return 3;
    } catch (const RotationError& e) {
        err << "optimization error: " << e.what() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace qimpute
