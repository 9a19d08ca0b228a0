#include "qimpute/pca.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"
#include "qimpute/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

namespace qimpute {

namespace {

constexpr int kModelFormatVersion = 1;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Runs kernel over [0, rows) in row blocks.
template <class Fn>
void for_row_blocks(std::size_t rows, unsigned threads, Fn&& fn) {
    parallel_for(rows, threads, [&](std::size_t b, std::size_t e) { fn(b, e); });
}

} // namespace

std::size_t choose_components(std::size_t n_features) {
    if (n_features == 0) throw ConfigError("choose_components: need at least one feature");
    return std::max<std::size_t>(2, std::bit_floor(n_features));
}

SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol, int max_sweeps) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw DataError("jacobi_eigen: matrix is not square");
    Matrix a = symmetric;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    int sweep = 0;
    for (; sweep < max_sweeps && off_diagonal_norm(a) >= tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {   // A <- A J
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {   // A <- J^T A
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off_diagonal_norm(a) >= tol)
        throw Error("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    out.sweeps = sweep;
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(order[i], order[i]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
    }
    return out;
}

PcaModel fit(const Dataset& d, const std::vector<std::string>& feature_columns, std::size_t k) {
    const auto cols = d.column_indices(feature_columns);
    const std::size_t n = d.rows();
    const std::size_t dim = cols.size();
    if (dim == 0) throw ConfigError("pca: no feature columns");
    if (k == 0 || k > dim)
        throw ConfigError("pca: component count " + std::to_string(k) + " must be in [1, " + std::to_string(dim) + "]");
    if (n < 2) throw DataError("pca: need at least two rows");

    PcaModel m;
    m.feature_names = feature_columns;
    m.mean.resize(dim);
    m.scale.resize(dim);
    Matrix z(n, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        double mu = 0.0;
        for (std::size_t r = 0; r < n; ++r) mu += d(r, cols[j]);
        mu /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += (d(r, cols[j]) - mu) * (d(r, cols[j]) - mu);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0)) throw DataError("pca: column '" + feature_columns[j] + "' has zero variance");
        m.mean[j] = mu;
        m.scale[j] = sd;
        for (std::size_t r = 0; r < n; ++r) z(r, j) = (d(r, cols[j]) - mu) / sd;
    }

    Matrix cov(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += z(r, i) * z(r, j);
            cov(i, j) = cov(j, i) = s / static_cast<double>(n - 1);
        }
    }

    const auto eig = jacobi_eigen(cov);
    m.components = Matrix(k, dim);
    m.eigenvalues.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        m.eigenvalues[i] = std::max(0.0, eig.values[i]);
        std::size_t pivot = 0;
        for (std::size_t j = 1; j < dim; ++j)
            if (std::fabs(eig.vectors(j, i)) > std::fabs(eig.vectors(pivot, i))) pivot = j;
        const double sign = eig.vectors(pivot, i) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < dim; ++j) m.components(i, j) = sign * eig.vectors(j, i);
    }
    return m;
}

Matrix project(const PcaModel& m, const Dataset& d, unsigned threads) {
    std::vector<std::size_t> cols;
    cols.reserve(m.d());
    for (const auto& name : m.feature_names) {
        const auto idx = d.find_column(name);
        if (!idx) throw DataError("pca: dataset lacks model feature '" + name + "'");
        cols.push_back(*idx);
    }
    const std::size_t n = d.rows();
    const std::size_t dim = m.d();
    const std::size_t k = m.k();
    Matrix standardized(n, dim);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < dim; ++j) standardized(r, j) = (d(r, cols[j]) - m.mean[j]) / m.scale[j];

    Matrix z(n, k);
    for_row_blocks(n, threads, [&](std::size_t b, std::size_t e) {
        kernels::matmul_nt({standardized.data() + b * dim, (e - b) * dim}, m.components.flat(),
                           {z.data() + b * k, (e - b) * k}, e - b, dim, k);
    });
    return z;
}

Matrix reconstruct_features(const PcaModel& m, const Matrix& z, unsigned threads) {
    const std::size_t k = m.k();
    const std::size_t dim = m.d();
    if (z.cols() != k)
        throw DataError("pca: component table has width " + std::to_string(z.cols()) + ", model expects " +
                        std::to_string(k));
    const std::size_t n = z.rows();
    const Matrix basis_t = m.components.transposed();   // d x k
    Matrix x(n, dim);
    for_row_blocks(n, threads, [&](std::size_t b, std::size_t e) {
        kernels::matmul_nt({z.data() + b * k, (e - b) * k}, basis_t.flat(), {x.data() + b * dim, (e - b) * dim},
                           e - b, k, dim);
        for (std::size_t r = b; r < e; ++r)
            for (std::size_t j = 0; j < dim; ++j) x(r, j) = x(r, j) * m.scale[j] + m.mean[j];
    });
    return x;
}

Dataset reconstruct(const PcaModel& m, const Matrix& z, const Dataset& like, unsigned threads) {
    if (z.rows() != like.rows()) throw DataError("pca: component table and dataset differ in row count");
    const Matrix x = reconstruct_features(m, z, threads);
    Dataset out = like;
    for (std::size_t j = 0; j < m.d(); ++j) {
        const std::size_t c = like.column_index(m.feature_names[j]);
        for (std::size_t r = 0; r < like.rows(); ++r) out(r, c) = x(r, j);
    }
    return out;
}

void PcaModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format"] = "qimpute-pca";
    j["version"] = kModelFormatVersion;
    j["feature_names"] = feature_names;
    j["mean"] = mean;
    j["scale"] = scale;
    j["eigenvalues"] = eigenvalues;
    auto& rows = j["components"] = nlohmann::json::array();
    for (std::size_t i = 0; i < components.rows(); ++i) {
        const auto r = components.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

PcaModel PcaModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format") != "qimpute-pca") throw DataError("'" + path.string() + "' is not a PCA model file");
        if (j.at("version").get<int>() != kModelFormatVersion)
            throw DataError("'" + path.string() + "': unsupported model version");
        PcaModel m;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.mean = j.at("mean").get<std::vector<double>>();
        m.scale = j.at("scale").get<std::vector<double>>();
        m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        const auto rows = j.at("components").get<std::vector<std::vector<double>>>();
        const std::size_t dim = m.feature_names.size();
        m.components = Matrix(rows.size(), dim);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != dim) throw DataError("'" + path.string() + "': ragged component matrix");
            std::copy(rows[i].begin(), rows[i].end(), m.components.row(i).begin());
        }
        if (m.mean.size() != dim || m.scale.size() != dim || m.eigenvalues.size() != rows.size())
            throw DataError("'" + path.string() + "': inconsistent model dimensions");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
}

} // namespace qimpute
