#include "qimpute/metrics.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace qimpute {

namespace {

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.empty() || b.empty()) throw DataError(std::string(what) + ": empty sample");
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Linear-interpolated quantile of a sorted sample.
double quantile(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

} // namespace

double kolmogorov_sf(double lambda) {
    constexpr double eps1 = 0.001;
    constexpr double eps2 = 1e-8;
    const double a2 = -2.0 * lambda * lambda;
    double fac = 2.0, sum = 0.0, prev = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = fac * std::exp(a2 * j * j);
        sum += term;
        if (std::fabs(term) <= eps1 * prev || std::fabs(term) <= eps2 * sum) return std::clamp(sum, 0.0, 1.0);
        fac = -fac;
        prev = std::fabs(term);
    }
    return 1.0;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, b, "ks_two_sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    return {d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)};
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, b, "wasserstein_1d");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    const std::size_t na = sa.size(), nb = sb.size();
    if (na == nb) {
        double s = 0.0;
        for (std::size_t i = 0; i < na; ++i) s += std::fabs(sa[i] - sb[i]);
        return s / static_cast<double>(na);
    }
    // Quantile functions are piecewise constant with breaks at i/na and j/nb.
    double total = 0.0, u = 0.0;
    std::size_t i = 0, j = 0;
    while (i < na && j < nb) {
        const std::size_t ki = (i + 1) * nb;   // (i+1)/na scaled by na*nb
        const std::size_t kj = (j + 1) * na;
        const double next = static_cast<double>(std::min(ki, kj)) / static_cast<double>(na * nb);
        total += (next - u) * std::fabs(sa[i] - sb[j]);
        u = next;
        if (ki <= kj) ++i;
        if (kj <= ki) ++j;
    }
    return total;
}

double population_variance(std::span<const double> v) {
    if (v.empty()) throw DataError("variance of an empty sample");
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

double population_sd(std::span<const double> v) { return std::sqrt(population_variance(v)); }

MetricReport::MetricReport(std::vector<std::string> features, std::vector<std::string> methods)
    : features_(std::move(features)), methods_(std::move(methods)), cells_(features_.size() * methods_.size()) {}

const MetricCell& MetricReport::at(const std::string& feature, const std::string& method) const {
    const auto f = std::find(features_.begin(), features_.end(), feature);
    if (f == features_.end()) throw DataError("report has no feature '" + feature + "'");
    const auto m = std::find(methods_.begin(), methods_.end(), method);
    if (m == methods_.end()) throw DataError("report has no method '" + method + "'");
    return at(static_cast<std::size_t>(f - features_.begin()), static_cast<std::size_t>(m - methods_.begin()));
}

MetricReport build_report(const Dataset& reference, const std::vector<NamedDataset>& methods,
                          const std::vector<std::string>& features, unsigned threads) {
    std::vector<std::string> names;
    for (const auto& m : methods) {
        if (!m.data) throw DataError("method '" + m.name + "' has no dataset");
        names.push_back(m.name);
    }
    MetricReport report(features, names);
    std::vector<std::vector<double>> ref_cols;
    std::vector<std::vector<std::size_t>> method_cols(methods.size());
    for (const auto& f : features) {
        ref_cols.push_back(reference.column(reference.column_index(f)));
        for (std::size_t m = 0; m < methods.size(); ++m) method_cols[m].push_back(methods[m].data->column_index(f));
    }
    const std::size_t nm = methods.size();
    parallel_for(features.size() * nm, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t cell = b; cell < e; ++cell) {
            const std::size_t f = cell / nm, m = cell % nm;
            const auto col = methods[m].data->column(method_cols[m][f]);
            auto& out = report.at(f, m);
            const auto ks = ks_two_sample(ref_cols[f], col);
            out.ks_statistic = ks.statistic;
            out.ks_p = ks.p;
            out.wasserstein = wasserstein_1d(ref_cols[f], col);
            out.variance = population_variance(col);
            out.sd = std::sqrt(out.variance);
        }
    });
    return report;
}

std::vector<std::filesystem::path> write_report_csvs(const MetricReport& report, const std::filesystem::path& dir) {
    struct Table {
        const char* file;
        double MetricCell::*field;
    };
    const Table tables[] = {{"ks.csv", &MetricCell::ks_p},
                            {"wasserstein.csv", &MetricCell::wasserstein},
                            {"sd.csv", &MetricCell::sd},
                            {"variance.csv", &MetricCell::variance}};
    std::vector<std::filesystem::path> written;
    for (const auto& t : tables) {
        const auto path = dir / t.file;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + path.string() + "'");
        out << "Feature Name";
        for (const auto& m : report.methods()) out << ',' << m;
        out << '\n';
        for (std::size_t f = 0; f < report.features().size(); ++f) {
            out << report.features()[f];
            for (std::size_t m = 0; m < report.methods().size(); ++m) out << ',' << format_real(report.at(f, m).*t.field);
            out << '\n';
        }
        out.flush();
        if (!out) throw DataError("write failed for '" + path.string() + "'");
        written.push_back(path);
    }
    return written;
}

KdeCurve gaussian_kde(std::span<const double> sample, std::size_t points) {
    if (sample.empty()) throw DataError("gaussian_kde: empty sample");
    if (points < 2) throw ConfigError("gaussian_kde: need at least two grid points");
    const auto s = sorted_copy(sample);
    const double n = static_cast<double>(s.size());
    const double sd = s.size() > 1 ? std::sqrt(population_variance(s) * n / (n - 1.0)) : 0.0;
    const double iqr = quantile(s, 0.75) - quantile(s, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) spread = 1.0;   // constant sample
    KdeCurve kde;
    kde.bandwidth = 0.9 * spread * std::pow(n, -0.2);
    const double h = kde.bandwidth;
    const double lo = s.front() - 3.0 * h;
    const double hi = s.back() + 3.0 * h;
    kde.grid.resize(points);
    kde.density.resize(points);
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
        double acc = 0.0;
        for (double v : s) {
            const double u = (x - v) / h;
            acc += std::exp(-0.5 * u * u);
        }
        kde.grid[g] = x;
        kde.density[g] = acc * norm;
    }
    return kde;
}

void write_kde_csv(const KdeCurve& kde, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "x,density\n";
    for (std::size_t i = 0; i < kde.grid.size(); ++i) out << format_real(kde.grid[i]) << ',' << format_real(kde.density[i]) << '\n';
    out.flush();
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

} // namespace qimpute
