#pragma once

#include "qimpute/matrix.hpp"
#include "qimpute/tabular.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qimpute {

// max(2, 2^floor(log2 n)): component counts are powers of two so each
// projected row fills a whole register of qubits.
std::size_t choose_components(std::size_t n_features);

struct SymmetricEigen {
    std::vector<double> values;   // descending
    Matrix vectors;               // column i pairs with values[i]
    int sweeps = 0;
};

// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below tol.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol = 1e-12, int max_sweeps = 100);

// PCA on z-scored features.
struct PcaModel {
    std::vector<std::string> feature_names;
    std::vector<double> mean;        // per feature
    std::vector<double> scale;       // per feature sample SD
    Matrix components;               // k x d, orthonormal rows
    std::vector<double> eigenvalues; // k, descending, clipped at 0

    std::size_t k() const noexcept { return components.rows(); }
    std::size_t d() const noexcept { return components.cols(); }

    void save(const std::filesystem::path& path) const;
    static PcaModel load(const std::filesystem::path& path);
};

// Top-k eigenpairs of the correlation matrix. Each component's
// largest-magnitude entry is made positive.
PcaModel fit(const Dataset& d, const std::vector<std::string>& feature_columns, std::size_t k);

// Z = ((X - mean) / scale) * components^T, n x k.
Matrix project(const PcaModel& m, const Dataset& d, unsigned threads = 1);

// Feature block (Z * components) * scale + mean, n x d.
Matrix reconstruct_features(const PcaModel& m, const Matrix& z, unsigned threads = 1);

// Copy of `like` with the model's feature columns replaced by the
// reconstruction of z; other columns and ids are carried over unchanged.
Dataset reconstruct(const PcaModel& m, const Matrix& z, const Dataset& like, unsigned threads = 1);

} // namespace qimpute
