#include "qimpute/config.hpp"

#include "qimpute/errors.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

namespace qimpute {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
    }
}

} // namespace

PipelineConfig config_from_json(const json& j) {
    check_keys(j, "config",
               {"seed", "target", "impute_columns", "pca_features", "central_tendency", "stats_measure", "components",
                "penalty", "optimizer", "lambda_band", "lambda_out", "knn_k", "reference", "threads"});
    PipelineConfig cfg;
    if (j.contains("seed") && !j["seed"].is_null()) {
        if (!j["seed"].is_number_integer() || (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()))
            throw ConfigError("seed must be a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("target")) {
        if (j["target"].is_null()) cfg.target_column.reset();
        else read(j, "target", *cfg.target_column);
    }
    read(j, "impute_columns", cfg.impute_columns);
    read(j, "pca_features", cfg.pca_features);
    std::string text;
    if (j.contains("central_tendency")) {
        read(j, "central_tendency", text);
        cfg.central_tendency = parse_central_tendency(text);
    }
    if (j.contains("stats_measure") && !j["stats_measure"].is_null()) {
        read(j, "stats_measure", text);
        cfg.stats_measure = parse_central_tendency(text);
    }
    if (j.contains("components") && !j["components"].is_null()) {
        std::size_t k = 0;
        read(j, "components", k);
        cfg.components = k;
    }
    if (j.contains("penalty")) {
        const auto& p = j["penalty"];
        check_keys(p, "penalty", {"closeness_fraction", "weight_low", "weight_high", "direction"});
        read(p, "closeness_fraction", cfg.penalty.closeness_fraction);
        read(p, "weight_low", cfg.penalty.weight_low);
        read(p, "weight_high", cfg.penalty.weight_high);
        if (p.contains("direction")) {
            read(p, "direction", text);
            cfg.penalty.direction = parse_penalty_direction(text);
        }
    }
    if (j.contains("optimizer")) {
        const auto& o = j["optimizer"];
        check_keys(o, "optimizer", {"method", "budget", "de", "annealing", "cobyla"});
        if (o.contains("method")) {
            read(o, "method", text);
            cfg.optimizer.method = parse_optimizer_method(text);
        }
        read(o, "budget", cfg.optimizer.budget);
        if (o.contains("de")) {
            check_keys(o["de"], "optimizer.de", {"population", "f", "cr"});
            read(o["de"], "population", cfg.optimizer.de.population);
            read(o["de"], "f", cfg.optimizer.de.f);
            read(o["de"], "cr", cfg.optimizer.de.cr);
        }
        if (o.contains("annealing")) {
            check_keys(o["annealing"], "optimizer.annealing", {"t0", "cooling", "step_sd"});
            read(o["annealing"], "t0", cfg.optimizer.annealing.t0);
            read(o["annealing"], "cooling", cfg.optimizer.annealing.cooling);
            read(o["annealing"], "step_sd", cfg.optimizer.annealing.step_sd);
        }
        if (o.contains("cobyla")) {
            check_keys(o["cobyla"], "optimizer.cobyla", {"restarts", "rho_begin", "rho_end"});
            read(o["cobyla"], "restarts", cfg.optimizer.cobyla.restarts);
            read(o["cobyla"], "rho_begin", cfg.optimizer.cobyla.rho_begin);
            read(o["cobyla"], "rho_end", cfg.optimizer.cobyla.rho_end);
        }
    }
    read(j, "lambda_band", cfg.lambda_band);
    read(j, "lambda_out", cfg.lambda_out);
    read(j, "knn_k", cfg.knn_k);
    if (j.contains("reference")) {
        read(j, "reference", text);
        cfg.reference = parse_reference_kind(text);
    }
    read(j, "threads", cfg.threads);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["target"] = cfg.target_column ? json(*cfg.target_column) : json(nullptr);
    j["impute_columns"] = cfg.impute_columns;
    j["pca_features"] = cfg.pca_features;
    j["central_tendency"] = to_string(cfg.central_tendency);
    j["stats_measure"] = to_string(cfg.effective_stats_measure());
    j["components"] = cfg.components ? json(*cfg.components) : json(nullptr);
    j["penalty"] = {{"closeness_fraction", cfg.penalty.closeness_fraction},
                    {"weight_low", cfg.penalty.weight_low},
                    {"weight_high", cfg.penalty.weight_high},
                    {"direction", to_string(cfg.penalty.direction)}};
    const auto& o = cfg.optimizer;
    j["optimizer"] = {{"method", to_string(o.method)},
                      {"budget", o.budget},
                      {"de", {{"population", o.de.population}, {"f", o.de.f}, {"cr", o.de.cr}}},
                      {"annealing",
                       {{"t0", o.annealing.t0}, {"cooling", o.annealing.cooling}, {"step_sd", o.annealing.step_sd}}},
                      {"cobyla",
                       {{"restarts", o.cobyla.restarts},
                        {"rho_begin", o.cobyla.rho_begin},
                        {"rho_end", o.cobyla.rho_end}}}};
    j["lambda_band"] = cfg.lambda_band;
    j["lambda_out"] = cfg.lambda_out;
    j["knn_k"] = cfg.knn_k;
    j["reference"] = to_string(cfg.reference);
    j["threads"] = cfg.threads;
    return j;
}

} // namespace qimpute
