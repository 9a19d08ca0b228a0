#include "oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.size(), m = b.size();
    CMatrix out(n * m, std::vector<std::complex<double>>(n * m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) out[i * m + k][j * m + l] = a[i][j] * b[k][l];
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double cdf(const std::vector<double>& s, double x) {
    std::size_t c = 0;
    for (double v : s) c += v <= x ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(s.size());
}

} // namespace

std::map<std::string, int> count_zeros_csv(const std::filesystem::path& csv, const std::vector<std::string>& columns) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    std::map<std::string, int> counts;
    std::vector<std::size_t> idx;
    for (const auto& c : columns) {
        const auto it = std::find(header.begin(), header.end(), c);
        if (it == header.end()) throw std::runtime_error("no column " + c);
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
        counts[c] = 0;
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (std::stod(cells[idx[i]]) == 0.0) ++counts[columns[i]];
    }
    return counts;
}

CMatrix rx_kron(double theta, int qubits) {
    const std::complex<double> c(std::cos(theta / 2), 0.0);
    const std::complex<double> s(0.0, -std::sin(theta / 2));
    const CMatrix rx = {{c, s}, {s, c}};
    CMatrix out = {{1.0}};
    for (int q = 0; q < qubits; ++q) out = kron(out, rx);
    return out;
}

std::vector<double> statevector_rotate(const std::vector<double>& amplitudes, double theta) {
    int q = 0;
    while ((std::size_t{1} << q) < amplitudes.size()) ++q;
    const CMatrix u = rx_kron(theta, q);
    std::vector<double> out(amplitudes.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < amplitudes.size(); ++j) acc += u[i][j] * amplitudes[j];
        out[i] = acc.real();
        norm += out[i] * out[i];
    }
    norm = std::sqrt(norm);
    for (double& v : out) v /= norm;
    return out;
}

std::pair<double, double> grid_scan_min(const std::function<double(double)>& f, double lo, double hi, int n) {
    double best_x = lo, best_f = f(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    return {best_x, best_f};
}

std::vector<double> knn_bruteforce(const RMatrix& x, const std::vector<std::vector<bool>>& missing,
                                   std::size_t target, int k) {
    const std::size_t n = x.size(), d = x.front().size();
    RMatrix z(n, std::vector<double>(d, 0.0));
    for (std::size_t c = 0; c < d; ++c) {
        std::vector<double> obs;
        for (std::size_t r = 0; r < n; ++r)
            if (!missing[r][c]) obs.push_back(x[r][c]);
        const double mu = mean_of(obs);
        double ss = 0.0;
        for (double v : obs) ss += (v - mu) * (v - mu);
        double sd = obs.size() > 1 ? std::sqrt(ss / static_cast<double>(obs.size() - 1)) : 0.0;
        if (sd == 0.0) sd = 1.0;
        for (std::size_t r = 0; r < n; ++r) z[r][c] = (x[r][c] - mu) / sd;
    }
    std::vector<double> out;
    for (std::size_t r = 0; r < n; ++r) {
        if (!missing[r][target]) continue;
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t o = 0; o < n; ++o) {
            if (missing[o][target]) continue;
            double ss = 0.0;
            int shared = 0;
            for (std::size_t c = 0; c < d; ++c) {
                if (missing[r][c] || missing[o][c]) continue;
                ss += (z[r][c] - z[o][c]) * (z[r][c] - z[o][c]);
                ++shared;
            }
            const double dist = shared ? std::sqrt(ss * static_cast<double>(d) / shared) : INFINITY;
            all.emplace_back(dist, o);
        }
        std::sort(all.begin(), all.end());
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += x[all[static_cast<std::size_t>(i)].second][target];
        out.push_back(s / k);
    }
    return out;
}

double ks_statistic_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (const auto* s : {&a, &b})
        for (double x : *s) d = std::max(d, std::fabs(cdf(a, x) - cdf(b, x)));
    return d;
}

double wasserstein_cdf(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pts(a);
    pts.insert(pts.end(), b.begin(), b.end());
    std::sort(pts.begin(), pts.end());
    std::vector<double> sa(a), sb(b);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double x = pts[i];
        const double fa = static_cast<double>(std::upper_bound(sa.begin(), sa.end(), x) - sa.begin()) / sa.size();
        const double fb = static_cast<double>(std::upper_bound(sb.begin(), sb.end(), x) - sb.begin()) / sb.size();
        total += std::fabs(fa - fb) * (pts[i + 1] - x);
    }
    return total;
}

std::vector<double> project_direct(const std::vector<double>& row, const std::vector<double>& mean,
                                   const std::vector<double>& scale, const RMatrix& components) {
    std::vector<double> out(components.size(), 0.0);
    for (std::size_t i = 0; i < components.size(); ++i)
        for (std::size_t j = 0; j < row.size(); ++j) out[i] += (row[j] - mean[j]) / scale[j] * components[i][j];
    return out;
}

void write_fixtures(const std::filesystem::path& csv, const std::filesystem::path& dir) {
    using nlohmann::json;
    std::filesystem::create_directories(dir);
    auto dump = [&](const char* name, const json& j) {
        std::ofstream out(dir / name);
        out << j.dump(1) << '\n';
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    };

    const std::vector<std::string> impute = {"SkinThickness", "Insulin", "BloodPressure",
                                             "BMI", "Glucose", "DiabetesPedigreeFunction"};
    dump("mask_counts.json", json(count_zeros_csv(csv, impute)));

    // rotation products for q = 1..3 at 20 angles each
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi), amp(-1.0, 1.0);
    json rot = json::array();
    for (int q = 1; q <= 3; ++q) {
        for (int t = 0; t < 20; ++t) {
            const double theta = angle(gen);
            const std::size_t dim = std::size_t{1} << q;
            std::vector<double> v(dim);
            double n = 0.0;
            for (double& x : v) {
                x = amp(gen);
                n += x * x;
            }
            for (double& x : v) x /= std::sqrt(n);
            const CMatrix u = rx_kron(theta, q);
            RMatrix real(dim, std::vector<double>(dim));
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) real[i][j] = u[i][j].real();
            rot.push_back({{"qubits", q}, {"theta", theta}, {"real_matrix", real}, {"input", v},
                           {"output", statevector_rotate(v, theta)}});
        }
    }
    dump("rotation.json", rot);

    auto quad = [](double t) { return (t - 1.0) * (t - 1.0); };
    auto bimodal = [](double t) { return std::min((t - 0.5) * (t - 0.5), (t - 2.5) * (t - 2.5)); };
    const auto [qx, qf] = grid_scan_min(quad, 0.0, std::numbers::pi, 100001);
    const auto [bx, bf] = grid_scan_min(bimodal, 0.0, std::numbers::pi, 100001);
    dump("toy_minima.json", {{"quadratic", {{"theta", qx}, {"cost", qf}}}, {"bimodal", {{"theta", bx}, {"cost", bf}}}});

    // KNN over the diabetes features (Outcome excluded), Insulin target, k = 5
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    std::vector<std::size_t> feat;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] != "Outcome") feat.push_back(c);
    RMatrix x;
    std::vector<std::vector<bool>> miss;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        std::vector<double> row;
        std::vector<bool> m;
        for (std::size_t c : feat) {
            row.push_back(std::stod(cells[c]));
            const bool imp = std::find(impute.begin(), impute.end(), header[c]) != impute.end();
            m.push_back(imp && row.back() == 0.0);
        }
        x.push_back(row);
        miss.push_back(m);
    }
    std::size_t target = 0;
    for (std::size_t i = 0; i < feat.size(); ++i)
        if (header[feat[i]] == "Insulin") target = i;
    dump("knn_insulin_k5.json", json(knn_bruteforce(x, miss, target, 5)));
}

} // namespace oracle
