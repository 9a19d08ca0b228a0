#include "qimpute/qrotate.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"
#include "qimpute/parallel.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace qimpute {

namespace {

constexpr double kDegenerateNorm = 1e-12;

void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw ConfigError("rotation angle " + std::to_string(theta) + " outside [0, pi]");
}

unsigned qubits_for(std::size_t k) {
    if (!is_power_of_two(k))
        throw DataError("amplitude encoding needs a power-of-two width, got " + std::to_string(k));
    return static_cast<unsigned>(std::countr_zero(k));
}

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

bool is_power_of_two(std::size_t k) noexcept { return std::has_single_bit(k); }

EncodedRow encode(std::span<const double> z_row) {
    qubits_for(z_row.size());
    EncodedRow e;
    e.amplitudes.assign(z_row.begin(), z_row.end());
    e.norm_factor = l2(z_row);
    if (e.norm_factor > 0.0)
        for (double& a : e.amplitudes) a /= e.norm_factor;
    return e;
}

RotationMatrix::RotationMatrix(double theta, unsigned qubits) : theta_(theta), qubits_(qubits) {
    check_theta(theta);
    if (qubits > 16) throw ConfigError("too many qubits: " + std::to_string(qubits));
    const std::size_t dim = std::size_t{1} << qubits;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);

    // powers by repeated multiplication, shared by every entry
    std::vector<double> cpow(qubits + 1, 1.0), spow(qubits + 1, 1.0);
    for (unsigned i = 1; i <= qubits; ++i) {
        cpow[i] = cpow[i - 1] * c;
        spow[i] = spow[i - 1] * s;
    }
    real_ = Matrix(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t jp = 0; jp < dim; ++jp) {
            const auto h = static_cast<unsigned>(std::popcount(j ^ jp));
            if (h % 2) continue;
            const double sign = (h / 2) % 2 ? -1.0 : 1.0;
            real_(j, jp) = sign * cpow[qubits - h] * spow[h];
        }
    }
}

EncodedRow rotate(const EncodedRow& e, double theta) {
    return rotate(e, RotationMatrix(theta, qubits_for(e.amplitudes.size())));
}

EncodedRow rotate(const EncodedRow& e, const RotationMatrix& rx) {
    if (e.degenerate()) throw RotationError("cannot rotate a degenerate (zero) row");
    const std::size_t k = e.amplitudes.size();
    if (k != rx.dim())
        throw DataError("row width " + std::to_string(k) + " does not match rotation dimension " +
                        std::to_string(rx.dim()));
    EncodedRow out;
    out.norm_factor = e.norm_factor;
    out.amplitudes.assign(k, 0.0);
    kernels::matmul_nt(e.amplitudes, rx.real().flat(), out.amplitudes, 1, k, k);
    const double n = l2(out.amplitudes);
    if (!(n >= kDegenerateNorm)) throw RotationError("degenerate angle for row");
    for (double& a : out.amplitudes) a /= n;
    return out;
}

Matrix rotate_table(const Matrix& z, double theta, unsigned threads, std::span<const std::int64_t> row_ids) {
    check_theta(theta);
    if (theta == 0.0 || z.rows() == 0) return z;
    const std::size_t n = z.rows();
    const std::size_t k = z.cols();
    const RotationMatrix rx(theta, qubits_for(k));
    if (!row_ids.empty() && row_ids.size() != n) throw DataError("row id count does not match table rows");

    Matrix out = z;
    parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> unit(k), rotated(k);
        for (std::size_t r = b; r < e; ++r) {
            const auto row = z.row(r);
            const double norm = l2(row);
            if (norm == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) unit[j] = row[j] / norm;
            kernels::matmul_nt(unit, rx.real().flat(), rotated, 1, k, k);
            const double rn = l2(rotated);
            if (!(rn >= kDegenerateNorm)) {
                const auto id = row_ids.empty() ? static_cast<std::int64_t>(r) : row_ids[r];
                throw RotationError("degenerate angle for row " + std::to_string(id) + " at theta " +
                                    std::to_string(theta));
            }
            auto dst = out.row(r);
            for (std::size_t j = 0; j < k; ++j) dst[j] = rotated[j] / rn * norm;
        }
    });
    return out;
}

} // namespace qimpute
