#pragma once

// Slow, direct re-implementations used only to cross-check the library. They
// share no code with it.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using CMatrix = std::vector<std::vector<std::complex<double>>>;
using RMatrix = std::vector<std::vector<double>>;

// Exact zeros per named column, read with getline + stod.
std::map<std::string, int> count_zeros_csv(const std::filesystem::path& csv, const std::vector<std::string>& columns);

// Rx(theta) = [[cos, -i sin], [-i sin, cos]] (half angles), Kronecker power q.
CMatrix rx_kron(double theta, int qubits);

// Real part of the rotated complex statevector, renormalized.
std::vector<double> statevector_rotate(const std::vector<double>& amplitudes, double theta);

// Minimum of f on an evenly spaced grid of n points over [lo, hi].
std::pair<double, double> grid_scan_min(const std::function<double(double)>& f, double lo, double hi, int n);

// KNN on z-scored columns, one value per masked cell of `target` (in row
// order). missing[r][c] marks masked cells; all-pairs scan with full sort.
std::vector<double> knn_bruteforce(const RMatrix& x, const std::vector<std::vector<bool>>& missing,
                                   std::size_t target, int k);

// sup |F_a - F_b| evaluated at every sample point by counting.
double ks_statistic_bruteforce(const std::vector<double>& a, const std::vector<double>& b);

// Integral of |F_a(x) - F_b(x)| dx.
double wasserstein_cdf(const std::vector<double>& a, const std::vector<double>& b);

// ((row - mean) / scale) . components^T with explicit loops.
std::vector<double> project_direct(const std::vector<double>& row, const std::vector<double>& mean,
                                   const std::vector<double>& scale, const RMatrix& components);

// Writes every regenerable fixture into dir. Needs the diabetes CSV.
void write_fixtures(const std::filesystem::path& csv, const std::filesystem::path& dir);

} // namespace oracle
