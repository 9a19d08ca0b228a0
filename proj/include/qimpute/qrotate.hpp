#pragma once

#include "qimpute/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qimpute {

bool is_power_of_two(std::size_t k) noexcept;

struct EncodedRow {
    std::vector<double> amplitudes;   // unit L2 norm unless degenerate
    double norm_factor = 0.0;         // L2 norm of the source row

    bool degenerate() const noexcept { return norm_factor == 0.0; }
};

// Amplitude encoding of one component row. A zero row is flagged degenerate
// and its amplitudes are left as given.
EncodedRow encode(std::span<const double> z_row);

// Real part of Rx(theta) applied to every one of `qubits` qubits. Entry
// (j, j') is cos^(q-h)(theta/2) * (-1)^(h/2) * sin^h(theta/2) when the Hamming
// distance h between j and j' is even and zero otherwise.
class RotationMatrix {
public:
    RotationMatrix(double theta, unsigned qubits);

    double theta() const noexcept { return theta_; }
    unsigned qubits() const noexcept { return qubits_; }
    std::size_t dim() const noexcept { return real_.rows(); }
    const Matrix& real() const noexcept { return real_; }

private:
    double theta_;
    unsigned qubits_;
    Matrix real_;
};

// Rotates and extracts the real part, renormalized to unit length. The norm
// factor is carried over. Throws ConfigError for theta outside [0, pi] and
// RotationError when the extracted vector vanishes.
EncodedRow rotate(const EncodedRow& e, double theta);
EncodedRow rotate(const EncodedRow& e, const RotationMatrix& rx);

// Encode, rotate and denormalize every row. Zero rows pass through and theta
// = 0 returns the input unchanged. `row_ids` (optional) names rows in errors.
Matrix rotate_table(const Matrix& z, double theta, unsigned threads = 1,
                    std::span<const std::int64_t> row_ids = {});

} // namespace qimpute
