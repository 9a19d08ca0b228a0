#pragma once

#include "qimpute/tabular.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qimpute {

enum class CentralTendency { mean, median, mode };

CentralTendency parse_central_tendency(std::string_view name);   // throws ConfigError
std::string_view to_string(CentralTendency m) noexcept;

// Central value of a non-empty sample. Mode bins by exact equality and breaks
// ties toward the smallest value.
double central_value(std::span<const double> values, CentralTendency m);

// (n-1)-denominator standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// Observed (unmasked, nonzero) values of one column.
std::vector<double> observed_values(const Dataset& d, const MissingMask& mask, std::size_t col);

// Replaces every masked cell with the column's central value over observed
// cells. Idempotent: the center never depends on previously imputed cells.
Dataset impute_central(const Dataset& d, const MissingMask& mask, CentralTendency m);

struct StatsRecord {
    std::int64_t row_id = 0;
    std::string column;
    std::size_t column_index = 0;
    double center = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

// One record per masked cell, with O(1) lookup by (row, column).
class ImputationStats {
public:
    ImputationStats() = default;
    ImputationStats(std::size_t rows, std::size_t cols, std::vector<StatsRecord> records,
                    std::vector<std::size_t> row_of_record);

    const std::vector<StatsRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

    // nullptr when the cell has no record
    const StatsRecord* find(std::size_t row, std::size_t col) const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<StatsRecord> records_;
    std::vector<std::int32_t> lookup_;   // rows_ * cols_, -1 when absent
};

// Center from the chosen measure and bounds center +/- 2 sd, both computed
// over the nonzero values of the original column.
ImputationStats compute_stats(const Dataset& d_imputed, const Dataset& d_original,
                              const MissingMask& mask, CentralTendency m);

// Audit export: row_id,column,center,upper,lower
void save_stats_csv(const ImputationStats& stats, const std::filesystem::path& path);

// K-nearest-neighbour imputation over z-scored feature columns. Distances
// skip coordinates missing in either row and are rescaled by
// (features / shared coordinates); ties go to the lower row id.
Dataset impute_knn(const Dataset& d, const MissingMask& mask, int k);

} // namespace qimpute
