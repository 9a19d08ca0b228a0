#include "qimpute/baseline.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace qimpute {

CentralTendency parse_central_tendency(std::string_view name) {
    if (name == "mean") return CentralTendency::mean;
    if (name == "median") return CentralTendency::median;
    if (name == "mode") return CentralTendency::mode;
    throw ConfigError("invalid central tendency '" + std::string(name) + "' (expected mean, median or mode)");
}

std::string_view to_string(CentralTendency m) noexcept {
    switch (m) {
    case CentralTendency::mean: return "mean";
    case CentralTendency::median: return "median";
    case CentralTendency::mode: return "mode";
    }
    return "mean";
}

double central_value(std::span<const double> values, CentralTendency m) {
    if (values.empty()) throw DataError("cannot estimate center of an empty sample");
    switch (m) {
    case CentralTendency::mean:
        return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    case CentralTendency::median: {
        std::vector<double> v(values.begin(), values.end());
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
    case CentralTendency::mode: {
        std::vector<double> v(values.begin(), values.end());
        std::sort(v.begin(), v.end());
        double best = v.front();
        std::size_t best_run = 0;
        for (std::size_t i = 0; i < v.size();) {
            std::size_t j = i;
            while (j < v.size() && v[j] == v[i]) ++j;
            if (j - i > best_run) {   // strict: earlier (smaller) value wins ties
                best_run = j - i;
                best = v[i];
            }
            i = j;
        }
        return best;
    }
    }
    return 0.0;
}

double sample_sd(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<double> observed_values(const Dataset& d, const MissingMask& mask, std::size_t col) {
    std::vector<double> out;
    out.reserve(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r)
        if (!mask.missing(r, col) && d(r, col) != 0.0) out.push_back(d(r, col));
    return out;
}

Dataset impute_central(const Dataset& d, const MissingMask& mask, CentralTendency m) {
    Dataset out = d;
    for (std::size_t c : mask.impute_indices()) {
        const auto observed = observed_values(d, mask, c);
        if (observed.empty())
            throw DataError("column '" + d.column_names()[c] + "': cannot estimate center (no nonzero values)");
        if (mask.count(c) == 0) continue;
        const double center = central_value(observed, m);
        for (std::size_t r = 0; r < d.rows(); ++r)
            if (mask.missing(r, c)) out(r, c) = center;
    }
    return out;
}

ImputationStats::ImputationStats(std::size_t rows, std::size_t cols, std::vector<StatsRecord> records,
                                 std::vector<std::size_t> row_of_record)
    : rows_(rows), cols_(cols), records_(std::move(records)), lookup_(rows * cols, -1) {
    if (row_of_record.size() != records_.size()) throw DataError("stats row index length mismatch");
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const std::size_t r = row_of_record[i];
        const std::size_t c = records_[i].column_index;
        if (r >= rows_ || c >= cols_) throw DataError("stats record outside the table");
        lookup_[r * cols_ + c] = static_cast<std::int32_t>(i);
    }
}

const StatsRecord* ImputationStats::find(std::size_t row, std::size_t col) const noexcept {
    if (row >= rows_ || col >= cols_) return nullptr;
    const auto idx = lookup_[row * cols_ + col];
    return idx < 0 ? nullptr : &records_[static_cast<std::size_t>(idx)];
}

ImputationStats compute_stats(const Dataset& d_imputed, const Dataset& d_original,
                              const MissingMask& mask, CentralTendency m) {
    if (d_imputed.rows() != d_original.rows() || d_imputed.cols() != d_original.cols())
        throw DataError("imputed and original datasets differ in shape");

    struct ColumnStats {
        double center, sd;
    };
    std::vector<ColumnStats> per_column(d_original.cols(), {0.0, 0.0});
    for (std::size_t c : mask.impute_indices()) {
        std::vector<double> nonzero;
        for (std::size_t r = 0; r < d_original.rows(); ++r)
            if (d_original(r, c) != 0.0) nonzero.push_back(d_original(r, c));
        if (nonzero.empty()) {
            if (mask.count(c) > 0)
                throw DataError("column '" + d_original.column_names()[c] +
                                "': cannot estimate center (no nonzero values)");
            continue;
        }
        per_column[c] = {central_value(nonzero, m), sample_sd(nonzero)};
    }

    std::vector<StatsRecord> records;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d_original.rows(); ++r) {
        for (std::size_t c : mask.impute_indices()) {
            if (!mask.missing(r, c)) continue;
            const auto [center, sd] = per_column[c];
            records.push_back({d_original.ids()[r], d_original.column_names()[c], c, center,
                               center + 2.0 * sd, center - 2.0 * sd});
            rows.push_back(r);
        }
    }
    return ImputationStats(d_original.rows(), d_original.cols(), std::move(records), std::move(rows));
}

void save_stats_csv(const ImputationStats& stats, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    auto real = [](double v) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    };
    out << "row_id,column,center,upper,lower\n";
    for (const auto& rec : stats.records())
        out << rec.row_id << ',' << rec.column << ',' << real(rec.center) << ',' << real(rec.upper) << ','
            << real(rec.lower) << '\n';
    out.flush();
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Dataset impute_knn(const Dataset& d, const MissingMask& mask, int k) {
    if (k <= 0) throw DataError("knn: k must be positive, got " + std::to_string(k));

    const auto features = d.column_indices(d.feature_columns());
    const std::size_t n = d.rows();
    const std::size_t f = features.size();

    // z-scored feature block and its missing flags, one row per record
    Matrix z(n, f);
    std::vector<std::uint8_t> missing(n * f, 0);
    for (std::size_t j = 0; j < f; ++j) {
        const std::size_t c = features[j];
        std::vector<double> obs;
        for (std::size_t r = 0; r < n; ++r)
            if (!mask.missing(r, c)) obs.push_back(d(r, c));
        const double mu = obs.empty() ? 0.0 : central_value(obs, CentralTendency::mean);
        double sd = sample_sd(obs);
        if (sd == 0.0) sd = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            missing[r * f + j] = mask.missing(r, c) ? 1 : 0;
            z(r, j) = mask.missing(r, c) ? 0.0 : (d(r, c) - mu) / sd;
        }
    }

    Dataset out = d;
    struct Neighbour {
        double dist;
        std::size_t row;
    };
    std::vector<Neighbour> candidates;
    for (std::size_t c : mask.impute_indices()) {
        std::vector<std::size_t> donors;
        for (std::size_t r = 0; r < n; ++r)
            if (!mask.missing(r, c)) donors.push_back(r);
        if (mask.count(c) == 0) continue;
        if (static_cast<std::size_t>(k) > donors.size())
            throw DataError("knn: k = " + std::to_string(k) + " exceeds the " + std::to_string(donors.size()) +
                            " observed rows of column '" + d.column_names()[c] + "'");

        for (std::size_t r = 0; r < n; ++r) {
            if (!mask.missing(r, c)) continue;
            candidates.clear();
            const std::span<const std::uint8_t> rm(missing.data() + r * f, f);
            for (std::size_t donor : donors) {
                std::size_t common = 0;
                const double ss = kernels::masked_sq_dist(z.row(r), z.row(donor), rm,
                                                          {missing.data() + donor * f, f}, common);
                const double dist = common == 0 ? std::numeric_limits<double>::infinity()
                                                : std::sqrt(ss * static_cast<double>(f) / static_cast<double>(common));
                candidates.push_back({dist, donor});
            }
            const auto kk = static_cast<std::size_t>(k);
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(kk), candidates.end(),
                              [&](const Neighbour& a, const Neighbour& b) {
                                  if (a.dist != b.dist) return a.dist < b.dist;
                                  return d.ids()[a.row] < d.ids()[b.row];
                              });
            double sum = 0.0;
            for (std::size_t i = 0; i < kk; ++i) sum += d(candidates[i].row, c);
            out(r, c) = sum / static_cast<double>(kk);
        }
    }
    return out;
}

} // namespace qimpute
