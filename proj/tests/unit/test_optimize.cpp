#include "support.hpp"

#include "qimpute/baseline.hpp"
#include "qimpute/errors.hpp"
#include "qimpute/optimize.hpp"
#include "qimpute/pca.hpp"
#include "qimpute/qrotate.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace qimpute;

namespace {

const std::vector<OptimizerMethod> kMethods = {OptimizerMethod::differential_evolution, OptimizerMethod::cobyla,
                                               OptimizerMethod::simulated_annealing};

const std::vector<std::string> kFeatures = {"Pregnancies", "Glucose", "BloodPressure", "SkinThickness",
                                            "Insulin", "BMI", "DiabetesPedigreeFunction", "Age"};

OptimizerConfig config_for(OptimizerMethod m, std::uint64_t seed = 17) {
    OptimizerConfig c;
    c.method = m;
    c.seed = seed;
    return c;
}

double quadratic(double t) { return (t - 1.0) * (t - 1.0); }
double bimodal(double t) { return std::min((t - 0.5) * (t - 0.5), (t - 2.5) * (t - 2.5)); }

struct Prepared {
    Dataset original, seeded;
    MissingMask mask;
    ImputationStats stats;
};

Prepared prepared() {
    Prepared p;
    p.original = testsupport::diabetes();
    p.mask = derive_mask(p.original, testsupport::kImputeColumns);
    p.seeded = impute_central(p.original, p.mask, CentralTendency::mean);
    p.stats = compute_stats(p.seeded, p.original, p.mask, CentralTendency::mean);
    return p;
}

} // namespace

TEST_CASE("method names") {
    CHECK(parse_optimizer_method("de") == OptimizerMethod::differential_evolution);
    CHECK(parse_optimizer_method("differential_evolution") == OptimizerMethod::differential_evolution);
    CHECK(parse_optimizer_method("cobyla") == OptimizerMethod::cobyla);
    CHECK(parse_optimizer_method("annealing") == OptimizerMethod::simulated_annealing);
    CHECK(parse_optimizer_method("simulated_annealing") == OptimizerMethod::simulated_annealing);
    CHECK_THROWS_AS(parse_optimizer_method("nelder_mead"), ConfigError);
    CHECK(column_label(OptimizerMethod::cobyla) == "COBYLA");
    CHECK(column_label(OptimizerMethod::simulated_annealing) == "Annealing");
}

TEST_CASE("config validation") {
    OptimizerConfig c;
    CHECK_NOTHROW(c.validate());
    c.budget = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.de.population = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.method = OptimizerMethod::simulated_annealing;
    c.annealing.cooling = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.method = OptimizerMethod::cobyla;
    c.cobyla.rho_end = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("every method finds the quadratic minimum at the default budget") {
    const double expected = testsupport::read_json(testsupport::fixture_path("toy_minima.json"))["quadratic"]["theta"];
    for (auto m : kMethods) {
        for (std::uint64_t seed : {1u, 2u, 3u, 17u}) {
            CAPTURE(to_string(m));
            CAPTURE(seed);
            const auto r = minimize(scalar_cost(quadratic), config_for(m, seed));
            REQUIRE(r.top.angles.size() == 3);
            CHECK(std::fabs(r.top.angles[0].theta - expected) <= 0.02);
            CHECK(r.method == m);
        }
    }
}

TEST_CASE("a two-basin cost yields angles from both basins") {
    const double right = testsupport::read_json(testsupport::fixture_path("toy_minima.json"))["bimodal"]["theta"];
    for (auto m : {OptimizerMethod::differential_evolution, OptimizerMethod::cobyla}) {
        CAPTURE(to_string(m));
        const auto r = minimize(scalar_cost(bimodal), config_for(m));
        bool left_hit = false, right_hit = false;
        for (const auto& a : r.top.angles) {
            left_hit = left_hit || std::fabs(a.theta - 0.5) < 0.1;
            right_hit = right_hit || std::fabs(a.theta - right) < 0.1;
        }
        CHECK(left_hit);
        CHECK(right_hit);
    }
}

TEST_CASE("history, bounds and ordering invariants") {
    for (auto m : kMethods) {
        CAPTURE(to_string(m));
        auto cfg = config_for(m);
        cfg.budget = 120;
        const auto r = minimize(scalar_cost([](double t) { return std::sin(3 * t) + 0.1 * t; }), cfg);
        CHECK(r.history.size() <= 120);
        CHECK(r.history.size() >= 3);
        for (std::size_t i = 0; i < r.history.size(); ++i) {
            CHECK(r.history[i].index == i);
            CHECK(r.history[i].cost.theta >= 0.0);
            CHECK(r.history[i].cost.theta <= std::numbers::pi);
        }
        for (std::size_t i = 0; i < r.top.angles.size(); ++i) {
            const auto& a = r.top.angles[i];
            CHECK(a.total == doctest::Approx(std::sin(3 * a.theta) + 0.1 * a.theta).epsilon(1e-15));
            if (i > 0) CHECK(r.top.angles[i - 1].total <= a.total);
            for (std::size_t j = 0; j < i; ++j) CHECK(std::fabs(r.top.angles[j].theta - a.theta) >= kAngleSeparation);
        }
    }
}

TEST_CASE("fixed seed gives bit-identical runs") {
    for (auto m : kMethods) {
        const auto a = minimize(scalar_cost(quadratic), config_for(m, 5));
        const auto b = minimize(scalar_cost(quadratic), config_for(m, 5));
        REQUIRE(a.history.size() == b.history.size());
        for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].cost.theta == b.history[i].cost.theta);
        for (std::size_t i = 0; i < 3; ++i) CHECK(a.top.angles[i].theta == b.top.angles[i].theta);
    }
    const auto a = minimize(scalar_cost(quadratic), config_for(OptimizerMethod::differential_evolution, 5));
    const auto c = minimize(scalar_cost(quadratic), config_for(OptimizerMethod::differential_evolution, 6));
    CHECK(a.history[0].cost.theta != c.history[0].cost.theta);
}

TEST_CASE("DE generations evaluated on several threads match the serial run") {
    auto cfg = config_for(OptimizerMethod::differential_evolution, 9);
    const auto serial = minimize(scalar_cost(bimodal), cfg);
    cfg.threads = 4;
    const auto threaded = minimize(scalar_cost(bimodal), cfg);
    REQUIRE(serial.history.size() == threaded.history.size());
    for (std::size_t i = 0; i < serial.history.size(); ++i)
        CHECK(serial.history[i].cost.theta == threaded.history[i].cost.theta);
}

TEST_CASE("budget equal to the DE population") {
    auto cfg = config_for(OptimizerMethod::differential_evolution);
    cfg.budget = cfg.de.population;
    const auto r = minimize(scalar_cost(quadratic), cfg);
    CHECK(r.history.size() == static_cast<std::size_t>(cfg.de.population));
    CHECK(r.top.angles.size() == 3);
}

TEST_CASE("top angle selection") {
    auto ev = [](std::vector<std::pair<double, double>> pts) {
        std::vector<Evaluation> h;
        for (std::size_t i = 0; i < pts.size(); ++i) h.push_back({i, {pts[i].first, 0, 0, 0, pts[i].second}});
        return h;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const auto top = select_top_angles(ev({{1.0, 0.1}, {1.01, 0.05}, {2.0, 0.3}, {1.5, 0.2}, {0.2, inf}}));
    REQUIRE(top.angles.size() == 3);
    CHECK(top.angles[0].theta == 1.01);
    CHECK(top.angles[1].theta == 1.5);
    CHECK(top.angles[2].theta == 2.0);

    const auto tie = select_top_angles(ev({{0.5, 1.0}, {1.5, 1.0}, {2.5, 1.0}, {3.0, 1.0}}));
    CHECK(tie.angles[0].theta == 0.5);
    CHECK(tie.angles[2].theta == 2.5);

    try {
        select_top_angles(ev({{1.0, 0.1}, {1.02, 0.2}, {1.04, 0.3}, {2.0, inf}}));
        FAIL("expected an error");
    } catch (const OptimizationError& e) {
        CHECK(std::string(e.what()).find("insufficient distinct minima") != std::string::npos);
    }
}

TEST_CASE("a one-evaluation annealing budget cannot supply three angles") {
    auto cfg = config_for(OptimizerMethod::simulated_annealing);
    cfg.budget = 1;
    CHECK_THROWS_AS(minimize(scalar_cost(quadratic), cfg), OptimizationError);
}

TEST_CASE("trace format") {
    std::ostringstream out;
    write_trace_header(out);
    write_trace(out, "cobyla", {{0, {0.5, 0.25, 0.125, 0.0625, 0.4375}}});
    CHECK(out.str() == "method,eval,theta,deviation,band_penalty,bound_penalty,total\n"
                       "cobyla,0,0.5,0.25,0.125,0.0625,0.4375\n");
}

TEST_CASE("rotation cost at theta = 0 is the truncation error on observed cells") {
    const Prepared p = prepared();
    const PcaModel pca = fit(p.seeded, kFeatures, 4);
    const Matrix z = project(pca, p.seeded);
    const RotationCost cost(z, pca, p.stats, p.mask, p.original, PenaltyConfig{});
    CHECK(cost.masked_cells() == 652);
    CHECK(cost.observed_cells() == 768 * 8 - 652);

    const Dataset x = reconstruct(pca, z, p.seeded);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& name : kFeatures) {
        const std::size_t c = p.original.column_index(name);
        std::vector<double> obs;
        for (std::size_t r = 0; r < x.rows(); ++r)
            if (!p.mask.missing(r, c)) obs.push_back(p.original(r, c));
        const double sd = sample_sd(obs);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            if (p.mask.missing(r, c)) continue;
            sum += std::fabs(x(r, c) - p.original(r, c)) / sd;
            ++n;
        }
    }
    const CostBreakdown b = cost(0.0);
    CHECK(b.theta == 0.0);
    CHECK(b.deviation == doctest::Approx(sum / static_cast<double>(n)).epsilon(1e-12));
    CHECK(b.deviation > 0.1);
    CHECK(b.total == doctest::Approx(b.deviation + b.band_penalty + b.bound_penalty).epsilon(1e-15));
    CHECK(b.band_penalty >= 0.0);
    CHECK(b.band_penalty <= 1.0);
    CHECK(b.bound_penalty >= 0.0);
    CHECK(b.bound_penalty <= 1.0);
}

TEST_CASE("rotation cost at full rank and theta = 0 is essentially zero deviation") {
    const Prepared p = prepared();
    const PcaModel pca = fit(p.seeded, kFeatures, 8);
    const RotationCost cost(project(pca, p.seeded), pca, p.stats, p.mask, p.original, PenaltyConfig{});
    const CostBreakdown b = cost(0.0);
    CHECK(b.deviation < 1e-10);
    // seeded masked cells sit at the center, inside the band
    CHECK(b.band_penalty == 1.0);
    CHECK(b.bound_penalty == 0.0);
}

TEST_CASE("penalty weights scale the total") {
    const Prepared p = prepared();
    const PcaModel pca = fit(p.seeded, kFeatures, 8);
    const Matrix z = project(pca, p.seeded);
    const RotationCost plain(z, pca, p.stats, p.mask, p.original, PenaltyConfig{}, 1.0, 1.0);
    const RotationCost weighted(z, pca, p.stats, p.mask, p.original, PenaltyConfig{}, 2.0, 0.0);
    const auto a = plain(0.7), b = weighted(0.7);
    CHECK(b.total == doctest::Approx(a.deviation + 2.0 * a.band_penalty).epsilon(1e-14));
    const RotationCost threaded(z, pca, p.stats, p.mask, p.original, PenaltyConfig{}, 1.0, 1.0, 4);
    CHECK(threaded(0.7).deviation == doctest::Approx(a.deviation).epsilon(1e-14));
}

TEST_CASE("a degenerate rotation costs infinity") {
    const Prepared p = prepared();
    const PcaModel pca = fit(p.seeded, kFeatures, 2);
    const RotationCost cost(project(pca, p.seeded), pca, p.stats, p.mask, p.original, PenaltyConfig{});
    const CostBreakdown b = cost(std::numbers::pi);
    CHECK(std::isinf(b.total));
    CHECK(std::isinf(b.deviation));
    CHECK(std::isfinite(cost(1.0).total));
}
