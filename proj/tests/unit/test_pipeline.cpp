#include "support.hpp"

#include "qimpute/config.hpp"
#include "qimpute/errors.hpp"
#include "qimpute/pipeline.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace qimpute;

namespace {

bool same_bits(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (std::bit_cast<std::uint64_t>(a(r, c)) != std::bit_cast<std::uint64_t>(b(r, c))) return false;
    return true;
}

std::string error_of(const Dataset& d, const PipelineConfig& cfg) {
    try {
        run(d, cfg);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("diabetes with defaults fills every masked cell within its bounds") {
    const Dataset d = testsupport::diabetes();
    const PipelineConfig cfg = testsupport::default_config();
    const PipelineResult r = run(d, cfg);
    const auto& p = r.prepared;
    CHECK(p.mask.total() == 652);
    CHECK(p.pca.k() == 8);
    CHECK(r.run.validation.ok());
    REQUIRE(r.run.candidates.size() == 3);

    std::size_t filled = 0;
    for (std::size_t row = 0; row < d.rows(); ++row) {
        for (std::size_t c = 0; c < d.cols(); ++c) {
            const double v = r.run.final_data(row, c);
            if (!p.mask.missing(row, c)) {
                CHECK(std::bit_cast<std::uint64_t>(v) == std::bit_cast<std::uint64_t>(d(row, c)));
                continue;
            }
            const StatsRecord* rec = p.stats.find(row, c);
            REQUIRE(rec != nullptr);
            CHECK(v != 0.0);
            CHECK(v >= rec->lower);
            CHECK(v <= rec->upper);
            ++filled;
        }
    }
    CHECK(filled == 652);

    const std::size_t ins = d.column_index("Insulin");
    for (std::size_t row = 0; row < d.rows(); ++row)
        if (p.mask.missing(row, ins)) CHECK(r.run.final_data(row, ins) > 0.0);

    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.run.candidates[i].index == i);
        CHECK(r.run.candidates[i].stream.theta_index == i);
        CHECK(r.run.candidates[i].stream.seed == r.run.correction_seed);
        CHECK(r.run.candidates[i].tally.masked == 652);
        for (std::size_t j = 0; j < i; ++j)
            CHECK(std::fabs(r.run.candidates[i].cost.theta - r.run.candidates[j].cost.theta) >= kAngleSeparation);
    }
    CHECK(r.run.optimizer_seed == optimizer_seed(1, OptimizerMethod::differential_evolution));
    CHECK(r.run.optimizer_seed != r.run.correction_seed);
    CHECK(optimizer_seed(1, OptimizerMethod::cobyla) != optimizer_seed(1, OptimizerMethod::differential_evolution));
    CHECK(optimizer_seed(2, OptimizerMethod::cobyla) != optimizer_seed(1, OptimizerMethod::cobyla));

    std::vector<std::string> stages;
    for (const auto& t : r.timings) stages.push_back(t.stage);
    CHECK(stages == std::vector<std::string>{"mask", "seed", "stats", "pca", "optimize", "candidates", "superimpose",
                                             "validate"});
}

TEST_CASE("whole-run determinism") {
    const Dataset d = testsupport::diabetes();
    PipelineConfig cfg = testsupport::default_config();
    for (auto m : {OptimizerMethod::differential_evolution, OptimizerMethod::cobyla,
                   OptimizerMethod::simulated_annealing}) {
        cfg.optimizer.method = m;
        const auto a = run(d, cfg);
        const auto b = run(d, cfg);
        CHECK(same_bits(a.run.final_data.values(), b.run.final_data.values()));
    }
    cfg.optimizer.method = OptimizerMethod::differential_evolution;
    const auto serial = run(d, cfg);
    cfg.threads = 4;
    const auto threaded = run(d, cfg);
    CHECK(same_bits(serial.run.final_data.values(), threaded.run.final_data.values()));
    cfg.threads = 1;
    cfg.seed = 2;
    CHECK_FALSE(same_bits(serial.run.final_data.values(), run(d, cfg).run.final_data.values()));
}

TEST_CASE("an empty mask leaves the original untouched") {
    const Dataset d = testsupport::diabetes();
    PipelineConfig cfg = testsupport::default_config();
    cfg.impute_columns = {"DiabetesPedigreeFunction"};
    const auto r = run(d, cfg);
    CHECK(r.prepared.mask.total() == 0);
    CHECK(same_bits(r.run.final_data.values(), d.values()));
    CHECK(r.run.validation.ok());
    // candidates carry the reconstruction, which moves observed cells
    CHECK_FALSE(same_bits(r.run.candidates[0].corrected.values(), d.values()));
}

TEST_CASE("averaging candidates") {
    Matrix m(2, 2, 0.0);
    const Dataset base({"x", "y"}, m);
    const MissingMask mask = derive_mask(base, {"x"});
    Dataset a = base, b = base, c = base;
    a(0, 0) = 1;
    b(0, 0) = 2;
    c(0, 0) = 3;
    a(0, 1) = 9;
    const Dataset avg = average_candidates(a, b, c, mask);
    CHECK(avg(0, 0) == 2.0);
    CHECK(avg(0, 1) == 9.0);
    CHECK(average_candidates(a, a, a, mask).values() == a.values());
    CHECK_THROWS_AS(average_candidates(a, Dataset({"x"}, Matrix(2, 1)), c, mask), DataError);
}

TEST_CASE("final validation") {
    const Dataset d = testsupport::diabetes();
    const auto r = run(d, testsupport::default_config());
    const auto& p = r.prepared;
    CHECK(validate_final(r.run.final_data, d, p.stats, p.mask).ok());

    const std::size_t ins = d.column_index("Insulin");
    std::size_t row = 0;
    while (!p.mask.missing(row, ins)) ++row;
    Dataset zeroed = r.run.final_data;
    zeroed(row, ins) = 0.0;
    const auto rep = validate_final(zeroed, d, p.stats, p.mask);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == Violation::Kind::zero_value);
    CHECK(rep.violations[0].row_id == d.ids()[row]);
    CHECK(rep.violations[0].column == "Insulin");

    Dataset high = r.run.final_data;
    high(row, ins) = p.stats.find(row, ins)->upper + 1.0;
    const auto rep2 = validate_final(high, d, p.stats, p.mask);
    REQUIRE(rep2.violations.size() == 1);
    CHECK(to_string(rep2.violations[0].kind) == "out_of_bounds");

    const std::size_t age = d.column_index("Age");
    Dataset mutated = r.run.final_data;
    mutated(3, age) += 1e-6;
    const auto rep3 = validate_final(mutated, d, p.stats, p.mask);
    REQUIRE(rep3.violations.size() == 1);
    CHECK(rep3.violations[0].kind == Violation::Kind::observed_mutation);
    CHECK(rep3.violations[0].column == "Age");

    CHECK_THROWS_AS(validate_final(Dataset({"x"}, Matrix(1, 1)), d, p.stats, p.mask), DataError);
}

TEST_CASE("configuration errors") {
    const Dataset d = testsupport::diabetes();
    PipelineConfig cfg = testsupport::default_config();
    cfg.seed.reset();
    CHECK(error_of(d, cfg).find("seed required") != std::string::npos);
    CHECK_THROWS_AS(run(d, cfg), ConfigError);

    cfg = testsupport::default_config();
    cfg.impute_columns.push_back("Outcome");
    CHECK_THROWS_AS(run(d, cfg), ConfigError);

    cfg = testsupport::default_config();
    cfg.pca_features.erase(cfg.pca_features.begin() + 1);   // drops Glucose
    CHECK(error_of(d, cfg).find("Glucose") != std::string::npos);

    cfg = testsupport::default_config();
    cfg.components = 6;
    CHECK(error_of(d, cfg).find("power of two") != std::string::npos);

    cfg = testsupport::default_config();
    cfg.knn_k = 0;
    CHECK_THROWS_AS(run(d, cfg), ConfigError);
}

TEST_CASE("errors name the stage that raised them") {
    const Dataset d = testsupport::diabetes();
    PipelineConfig cfg = testsupport::default_config();
    cfg.impute_columns = {"Glucose", "Nope"};
    cfg.pca_features.clear();
    CHECK(error_of(d, cfg).rfind("mask: ", 0) == 0);
    CHECK_THROWS_AS(run(d, cfg), DataError);

    cfg = testsupport::default_config();
    cfg.optimizer.method = OptimizerMethod::simulated_annealing;
    cfg.optimizer.budget = 1;
    CHECK(error_of(d, cfg).rfind("optimize: ", 0) == 0);
    CHECK_THROWS_AS(run(d, cfg), OptimizationError);

    Dataset flat = d;
    for (std::size_t r = 0; r < flat.rows(); ++r) flat(r, flat.column_index("Age")) = 30.0;
    CHECK(error_of(flat, testsupport::default_config()).rfind("pca: ", 0) == 0);
}

TEST_CASE("reference table selection") {
    const Dataset d = testsupport::diabetes();
    PipelineConfig cfg = testsupport::default_config();
    const PreparedData p = prepare(d, cfg);
    CHECK(&reference_dataset(p, cfg) == &p.seeded);
    cfg.reference = ReferenceKind::raw;
    CHECK(&reference_dataset(p, cfg) == &p.original);
    CHECK(parse_reference_kind("raw") == ReferenceKind::raw);
    CHECK_THROWS_AS(parse_reference_kind("cooked"), ConfigError);
}

TEST_CASE("config round trip") {
    const PipelineConfig cfg = testsupport::default_config();
    CHECK(cfg.seed == 1u);
    const auto j = config_to_json(cfg);
    CHECK(config_to_json(config_from_json(j)) == j);
    auto bad = j;
    bad["unexpected"] = 1;
    CHECK_THROWS_AS(config_from_json(bad), ConfigError);
    bad = j;
    bad["knn_k"] = "five";
    CHECK_THROWS_AS(config_from_json(bad), ConfigError);
}
