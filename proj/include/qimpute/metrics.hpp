#pragma once

#include "qimpute/tabular.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qimpute {

struct KsResult {
    double statistic = 0.0;
    double p = 1.0;
};

// Survival function of the Kolmogorov distribution,
// 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), clipped to [0, 1]. Returns 1
// when the series has not converged (lambda near 0).
double kolmogorov_sf(double lambda);

// Two-sample KS with the asymptotic p-value at effective size
// n_a n_b / (n_a + n_b) and the small-sample correction to lambda.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Integral of |F_a^-1(u) - F_b^-1(u)| over (0, 1).
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

// ddof = 0
double population_variance(std::span<const double> v);
double population_sd(std::span<const double> v);

struct MetricCell {
    double ks_statistic = 0.0;
    double ks_p = 1.0;
    double wasserstein = 0.0;
    double sd = 0.0;
    double variance = 0.0;
};

struct NamedDataset {
    std::string name;
    const Dataset* data = nullptr;
};

class MetricReport {
public:
    MetricReport() = default;
    MetricReport(std::vector<std::string> features, std::vector<std::string> methods);

    const std::vector<std::string>& features() const noexcept { return features_; }
    const std::vector<std::string>& methods() const noexcept { return methods_; }

    MetricCell& at(std::size_t feature, std::size_t method) { return cells_[feature * methods_.size() + method]; }
    const MetricCell& at(std::size_t feature, std::size_t method) const {
        return cells_[feature * methods_.size() + method];
    }
    // throws DataError for unknown names
    const MetricCell& at(const std::string& feature, const std::string& method) const;

private:
    std::vector<std::string> features_;
    std::vector<std::string> methods_;
    std::vector<MetricCell> cells_;
};

// Compares each method's feature columns against the reference. sd and
// variance describe the method's own column.
MetricReport build_report(const Dataset& reference, const std::vector<NamedDataset>& methods,
                          const std::vector<std::string>& features, unsigned threads = 1);

// ks.csv (p-values), wasserstein.csv, sd.csv and variance.csv: one row per
// feature, one column per method.
std::vector<std::filesystem::path> write_report_csvs(const MetricReport& report, const std::filesystem::path& dir);

struct KdeCurve {
    double bandwidth = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
};

// Gaussian KDE with Silverman's bandwidth 0.9 min(sd, IQR / 1.34) n^(-1/5)
// on an even grid over [min - 3h, max + 3h].
KdeCurve gaussian_kde(std::span<const double> sample, std::size_t points = 512);

void write_kde_csv(const KdeCurve& kde, const std::filesystem::path& path);

} // namespace qimpute
