#include "qimpute/optimize.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"
#include "qimpute/qrotate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qimpute {

RotationCost::RotationCost(const Matrix& z, const PcaModel& pca, const ImputationStats& stats,
                           const MissingMask& mask, const Dataset& original, PenaltyConfig penalty,
                           double lambda_band, double lambda_out, unsigned threads)
    : z_(z), pca_(pca), penalty_(penalty), lambda_band_(lambda_band), lambda_out_(lambda_out),
      threads_(threads), ids_(original.ids()) {
    penalty_.validate();
    const std::size_t n = original.rows();
    const std::size_t d = pca.d();
    if (z.rows() != n) throw DataError("component table and dataset differ in row count");
    if (mask.rows() != n || mask.cols() != original.cols()) throw DataError("mask shape does not match dataset");

    std::vector<std::size_t> cols;
    for (const auto& name : pca.feature_names) cols.push_back(original.column_index(name));

    observed_block_ = Matrix(n, d);
    skip_.assign(n * d, 0);
    scale_.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> obs;
        for (std::size_t r = 0; r < n; ++r) {
            observed_block_(r, j) = original(r, cols[j]);
            if (mask.missing(r, cols[j])) {
                skip_[r * d + j] = 1;
            } else {
                obs.push_back(original(r, cols[j]));
                ++observed_;
            }
        }
        const double sd = sample_sd(obs);
        scale_[j] = sd > 0.0 ? 1.0 / sd : 1.0;
    }

    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c : mask.impute_indices()) {
            if (!mask.missing(r, c)) continue;
            const auto it = std::find(cols.begin(), cols.end(), c);
            if (it == cols.end())
                throw ConfigError("impute column '" + original.column_names()[c] + "' is not a PCA feature");
            const StatsRecord* rec = stats.find(r, c);
            if (!rec)
                throw DataError("no stats record for masked cell (row " + std::to_string(original.ids()[r]) +
                                ", column " + original.column_names()[c] + ")");
            masked_.push_back({r, static_cast<std::size_t>(it - cols.begin()), rec->center, rec->lower, rec->upper});
        }
    }
}

CostBreakdown RotationCost::operator()(double theta) const {
    CostBreakdown out;
    out.theta = theta;
    Matrix rotated;
    try {
        rotated = rotate_table(z_, theta, threads_, ids_);
    } catch (const RotationError&) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        out.deviation = out.band_penalty = out.bound_penalty = out.total = inf;
        return out;
    }
    const Matrix xhat = reconstruct_features(pca_, rotated, threads_);
    const std::size_t d = pca_.d();

    double dev = 0.0;
    for (std::size_t r = 0; r < xhat.rows(); ++r)
        dev += kernels::weighted_abs_dev(xhat.row(r), observed_block_.row(r), scale_, {skip_.data() + r * d, d});
    out.deviation = observed_ > 0 ? dev / static_cast<double>(observed_) : 0.0;

    std::size_t outside = 0, band = 0;
    for (const auto& m : masked_) {
        const double raw = xhat(m.row, m.feature);
        if (raw < m.lower || raw > m.upper) ++outside;
        const double clamped = std::min(std::max(raw, m.lower), m.upper);
        if (in_closeness_band(clamped, m.center, m.lower, m.upper, penalty_.closeness_fraction)) ++band;
    }
    if (!masked_.empty()) {
        out.band_penalty = static_cast<double>(band) / static_cast<double>(masked_.size());
        out.bound_penalty = static_cast<double>(outside) / static_cast<double>(masked_.size());
    }
    out.total = out.deviation + lambda_band_ * out.band_penalty + lambda_out_ * out.bound_penalty;
    return out;
}

} // namespace qimpute
