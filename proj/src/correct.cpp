#include "qimpute/correct.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qimpute {

PenaltyDirection parse_penalty_direction(std::string_view name) {
    if (name == "away_from_center") return PenaltyDirection::away_from_center;
    if (name == "as_written") return PenaltyDirection::as_written;
    throw ConfigError("invalid penalty direction '" + std::string(name) +
                      "' (expected away_from_center or as_written)");
}

std::string_view to_string(PenaltyDirection d) noexcept {
    return d == PenaltyDirection::as_written ? "as_written" : "away_from_center";
}

void PenaltyConfig::validate() const {
    if (!(closeness_fraction > 0.0 && closeness_fraction < 0.5))
        throw ConfigError("closeness_fraction must be in (0, 0.5), got " + std::to_string(closeness_fraction));
    if (!(weight_low >= 0.0 && weight_low <= weight_high && weight_high <= 1.0))
        throw ConfigError("penalty weights must satisfy 0 <= weight_low <= weight_high <= 1");
}

double clamp_bounds(double x, double lower, double upper) {
    if (lower > upper)
        throw DataError("invalid bounds: lower " + std::to_string(lower) + " exceeds upper " + std::to_string(upper));
    return std::min(std::max(x, lower), upper);
}

bool in_closeness_band(double x, double center, double lower, double upper, double closeness_fraction) noexcept {
    return std::fabs(x - center) < closeness_fraction * (upper - lower);
}

double anti_cluster(double x, double center, double lower, double upper, double w, const PenaltyConfig& cfg) {
    if (!in_closeness_band(x, center, lower, upper, cfg.closeness_fraction)) return x;
    const double delta = std::min(std::fabs(x - lower), std::fabs(x - upper));
    const bool below = x < center;
    const bool outward = cfg.direction == PenaltyDirection::away_from_center;
    const double shifted = (below == outward) ? x - w * delta : x + w * delta;
    return clamp_bounds(shifted, lower, upper);
}

double correction_weight(const CorrectionStream& s, std::int64_t row_id, std::size_t col,
                         const PenaltyConfig& cfg) noexcept {
    const double u = counter_uniform(s.seed, s.theta_index, static_cast<std::uint64_t>(row_id), col);
    return cfg.weight_low + (cfg.weight_high - cfg.weight_low) * u;
}

Dataset correct_reconstruction(const Dataset& x_hat, const ImputationStats& stats, const MissingMask& mask,
                               const PenaltyConfig& cfg, const CorrectionStream& stream, CorrectionTally* tally) {
    if (mask.rows() != x_hat.rows() || mask.cols() != x_hat.cols())
        throw DataError("mask shape does not match the reconstructed table");
    Dataset out = x_hat;
    CorrectionTally t;
    for (std::size_t r = 0; r < x_hat.rows(); ++r) {
        for (std::size_t c : mask.impute_indices()) {
            if (!mask.missing(r, c)) continue;
            const StatsRecord* rec = stats.find(r, c);
            if (!rec)
                throw DataError("no stats record for masked cell (row " + std::to_string(x_hat.ids()[r]) +
                                ", column " + x_hat.column_names()[c] + ")");
            const double raw = x_hat(r, c);
            ++t.masked;
            if (raw < rec->lower || raw > rec->upper) ++t.out_of_bounds;
            const double clamped = clamp_bounds(raw, rec->lower, rec->upper);
            if (in_closeness_band(clamped, rec->center, rec->lower, rec->upper, cfg.closeness_fraction)) ++t.in_band;
            const double w = correction_weight(stream, x_hat.ids()[r], c, cfg);
            out(r, c) = anti_cluster(clamped, rec->center, rec->lower, rec->upper, w, cfg);
        }
    }
    if (tally) *tally = t;
    return out;
}

} // namespace qimpute
