#include "qimpute/kernels.hpp"

#include <cmath>

namespace qimpute::kernels::detail {

namespace {

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * k;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
            out[i * m + j] = acc;
        }
    }
}

double masked_sq_dist(const double* x, const double* y,
                      const std::uint8_t* xm, const std::uint8_t* ym,
                      std::size_t d, std::size_t* common) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < d; ++t) {
        if (xm[t] || ym[t]) continue;
        const double diff = x[t] - y[t];
        acc += diff * diff;
        ++count;
    }
    *common = count;
    return acc;
}

double weighted_abs_dev(const double* x, const double* y, const double* w,
                        const std::uint8_t* skip, std::size_t d) {
    double acc = 0.0;
    for (std::size_t t = 0; t < d; ++t)
        if (!skip[t]) acc += std::fabs(x[t] - y[t]) * w[t];
    return acc;
}

} // namespace

const KernelTable scalar_table{Isa::scalar, &matmul_nt, &masked_sq_dist, &weighted_abs_dev};

} // namespace qimpute::kernels::detail
