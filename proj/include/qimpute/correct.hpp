#pragma once

#include "qimpute/baseline.hpp"
#include "qimpute/tabular.hpp"

#include <cstdint>
#include <string_view>

namespace qimpute {

enum class PenaltyDirection { away_from_center, as_written };

PenaltyDirection parse_penalty_direction(std::string_view name);   // throws ConfigError
std::string_view to_string(PenaltyDirection d) noexcept;

struct PenaltyConfig {
    double closeness_fraction = 0.05;
    double weight_low = 0.1;
    double weight_high = 0.5;
    PenaltyDirection direction = PenaltyDirection::away_from_center;

    void validate() const;   // throws ConfigError
};

double clamp_bounds(double x, double lower, double upper);   // throws DataError if lower > upper

// |x - center| < closeness_fraction * (upper - lower)
bool in_closeness_band(double x, double center, double lower, double upper, double closeness_fraction) noexcept;

// Shifts a value that sits inside the closeness band by w * delta, where delta
// is its distance to the nearer bound, then re-clamps. away_from_center moves
// it outward; as_written moves it toward the center.
double anti_cluster(double x, double center, double lower, double upper, double w, const PenaltyConfig& cfg);

// Key of the per-cell weight stream. One theta index per candidate keeps the
// draws of different candidates independent.
struct CorrectionStream {
    std::uint64_t seed = 0;
    std::uint64_t theta_index = 0;
};

double correction_weight(const CorrectionStream& s, std::int64_t row_id, std::size_t col, const PenaltyConfig& cfg) noexcept;

struct CorrectionTally {
    std::size_t masked = 0;
    std::size_t out_of_bounds = 0;   // before clamping
    std::size_t in_band = 0;         // after clamping, before the shift
};

// Clamps and anti-clusters every masked cell of x_hat. Unmasked cells are
// returned untouched.
Dataset correct_reconstruction(const Dataset& x_hat, const ImputationStats& stats, const MissingMask& mask,
                               const PenaltyConfig& cfg, const CorrectionStream& stream,
                               CorrectionTally* tally = nullptr);

} // namespace qimpute
