#include "support.hpp"

#include "qimpute/baseline.hpp"
#include "qimpute/correct.hpp"
#include "qimpute/errors.hpp"
#include "qimpute/random.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace qimpute;

namespace {

struct Fixture {
    Dataset original;
    MissingMask mask;
    ImputationStats stats;
};

Fixture diabetes_fixture() {
    Fixture f;
    f.original = testsupport::diabetes();
    f.mask = derive_mask(f.original, testsupport::kImputeColumns);
    f.stats = compute_stats(impute_central(f.original, f.mask, CentralTendency::mean), f.original, f.mask,
                            CentralTendency::mean);
    return f;
}

// Reconstruction stand-in: masked cells spread well beyond the bounds.
Dataset noisy(const Fixture& f, std::uint64_t seed) {
    Rng rng(seed);
    Dataset x = f.original;
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c : f.mask.impute_indices())
            if (f.mask.missing(r, c)) {
                const StatsRecord* rec = f.stats.find(r, c);
                x(r, c) = rec->center + rng.normal() * (rec->upper - rec->lower) * 0.5;
            }
    return x;
}

} // namespace

TEST_CASE("clamping") {
    CHECK(clamp_bounds(200, 57, 185) == 185);
    CHECK(clamp_bounds(100, 57, 185) == 100);
    CHECK(clamp_bounds(10, 57, 185) == 57);
    CHECK(clamp_bounds(3.5, 7, 7) == 7);
    CHECK_THROWS_AS(clamp_bounds(1, 5, 4), DataError);
}

TEST_CASE("closeness band and shift direction") {
    const PenaltyConfig away;
    PenaltyConfig written;
    written.direction = PenaltyDirection::as_written;

    CHECK(in_closeness_band(123, 121, 57, 185, 0.05));
    CHECK_FALSE(in_closeness_band(140, 121, 57, 185, 0.05));
    CHECK_FALSE(in_closeness_band(121 + 6.4, 121, 57, 185, 0.05));

    CHECK(anti_cluster(123, 121, 57, 185, 0.5, away) == 154.0);
    CHECK(anti_cluster(123, 121, 57, 185, 0.5, written) == 92.0);
    CHECK(anti_cluster(118, 121, 57, 185, 0.5, away) == 87.5);
    CHECK(anti_cluster(160, 121, 57, 185, 0.5, away) == 160.0);
    CHECK(anti_cluster(7, 7, 7, 7, 0.3, away) == 7.0);
}

TEST_CASE("penalty config parsing and validation") {
    CHECK(parse_penalty_direction("away_from_center") == PenaltyDirection::away_from_center);
    CHECK(parse_penalty_direction("as_written") == PenaltyDirection::as_written);
    CHECK_THROWS_AS(parse_penalty_direction("outward"), ConfigError);
    CHECK(to_string(PenaltyDirection::as_written) == "as_written");

    PenaltyConfig c;
    CHECK_NOTHROW(c.validate());
    c.weight_low = 0.6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.closeness_fraction = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.weight_high = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("outward shift never leaves a value strictly inside the band") {
    Rng rng(42);
    const PenaltyConfig cfg;
    for (int i = 0; i < 20000; ++i) {
        const double lower = rng.uniform(-100, 100);
        const double upper = lower + rng.uniform(0.01, 200);
        const double center = 0.5 * (lower + upper);
        const double half = cfg.closeness_fraction * (upper - lower);
        const double x = rng.uniform(center - half, center + half);
        const double w = rng.uniform(cfg.weight_low, cfg.weight_high);
        const double y = anti_cluster(x, center, lower, upper, w, cfg);
        CHECK(y >= lower);
        CHECK(y <= upper);
        if (in_closeness_band(x, center, lower, upper, cfg.closeness_fraction))
            CHECK_FALSE(in_closeness_band(y, center, lower, upper, cfg.closeness_fraction));
    }
}

TEST_CASE("correction weights stay in range and depend on every key part") {
    const PenaltyConfig cfg;
    const CorrectionStream s{123, 0};
    double lo = 1.0, hi = 0.0;
    for (std::int64_t r = 0; r < 5000; ++r) {
        const double w = correction_weight(s, r, 4, cfg);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    CHECK(lo >= 0.1);
    CHECK(hi < 0.5);
    CHECK(hi - lo > 0.39);
    CHECK(correction_weight(s, 7, 4, cfg) == correction_weight(s, 7, 4, cfg));
    CHECK(correction_weight(s, 7, 4, cfg) != correction_weight({123, 1}, 7, 4, cfg));
    CHECK(correction_weight(s, 7, 4, cfg) != correction_weight({124, 0}, 7, 4, cfg));
    CHECK(correction_weight(s, 7, 4, cfg) != correction_weight(s, 8, 4, cfg));
    CHECK(correction_weight(s, 7, 4, cfg) != correction_weight(s, 7, 5, cfg));
}

TEST_CASE("diabetes reconstruction is clamped, tallied and leaves observed cells alone") {
    const Fixture f = diabetes_fixture();
    Dataset x = noisy(f, 5);
    const std::size_t g = x.column_index("Glucose");
    std::size_t glucose_row = 0;
    while (!f.mask.missing(glucose_row, g)) ++glucose_row;
    x(glucose_row, g) = 210.0;

    CorrectionTally tally;
    const Dataset out = correct_reconstruction(x, f.stats, f.mask, PenaltyConfig{}, {99, 0}, &tally);
    const StatsRecord* grec = f.stats.find(glucose_row, g);
    CHECK(out(glucose_row, g) <= grec->upper);
    CHECK(out(glucose_row, g) == grec->upper);

    std::size_t outside = 0, band = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            if (!f.mask.missing(r, c)) {
                CHECK(std::bit_cast<std::uint64_t>(out(r, c)) == std::bit_cast<std::uint64_t>(x(r, c)));
                continue;
            }
            const StatsRecord* rec = f.stats.find(r, c);
            CHECK(out(r, c) >= rec->lower);
            CHECK(out(r, c) <= rec->upper);
            if (x(r, c) < rec->lower || x(r, c) > rec->upper) ++outside;
            const double clamped = clamp_bounds(x(r, c), rec->lower, rec->upper);
            if (in_closeness_band(clamped, rec->center, rec->lower, rec->upper, 0.05)) ++band;
        }
    }
    CHECK(tally.masked == 652);
    CHECK(tally.out_of_bounds == outside);
    CHECK(tally.in_band == band);
    CHECK(band > 0);
}

TEST_CASE("in-bounds values outside the band pass through") {
    const Fixture f = diabetes_fixture();
    Dataset x = f.original;
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c : f.mask.impute_indices())
            if (f.mask.missing(r, c)) {
                const StatsRecord* rec = f.stats.find(r, c);
                x(r, c) = rec->lower + 0.2 * (rec->upper - rec->lower);
            }
    CorrectionTally tally;
    const Dataset out = correct_reconstruction(x, f.stats, f.mask, PenaltyConfig{}, {1, 0}, &tally);
    CHECK(out.values() == x.values());
    CHECK(tally.in_band == 0);
    CHECK(tally.out_of_bounds == 0);
}

TEST_CASE("correction is deterministic for a fixed stream") {
    const Fixture f = diabetes_fixture();
    const Dataset x = noisy(f, 8);
    const Dataset a = correct_reconstruction(x, f.stats, f.mask, PenaltyConfig{}, {31, 2});
    const Dataset b = correct_reconstruction(x, f.stats, f.mask, PenaltyConfig{}, {31, 2});
    CHECK(a.values() == b.values());
}

TEST_CASE("missing stats record is an error") {
    const Fixture f = diabetes_fixture();
    CHECK_THROWS_AS(correct_reconstruction(f.original, ImputationStats{}, f.mask, PenaltyConfig{}, {1, 0}), DataError);
}
