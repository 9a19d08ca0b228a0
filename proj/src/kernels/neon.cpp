// AArch64 only; NEON is part of the base ISA there, so no runtime check.

#include "qimpute/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace qimpute::kernels::detail {

namespace {

// all-ones lanes where both bytes at p are zero
inline uint64x2_t zero_bytes_mask(const std::uint8_t* p) {
    uint64x2_t lanes = vdupq_n_u64(0);
    lanes = vsetq_lane_u64(p[0], lanes, 0);
    lanes = vsetq_lane_u64(p[1], lanes, 1);
    return vceqq_u64(lanes, vdupq_n_u64(0));
}

inline double dot(const double* a, const double* b, std::size_t k) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t t = 0;
    for (; t + 4 <= k; t += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + t), vld1q_f64(b + t));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + t + 2), vld1q_f64(b + t + 2));
    }
    if (t + 2 <= k) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + t), vld1q_f64(b + t));
        t += 2;
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; t < k; ++t) acc += a[t] * b[t];
    return acc;
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out[i * m + j] = dot(a + i * k, b + j * k, k);
}

double masked_sq_dist(const double* x, const double* y,
                      const std::uint8_t* xm, const std::uint8_t* ym,
                      std::size_t d, std::size_t* common) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t count = 0;
    std::size_t t = 0;
    for (; t + 2 <= d; t += 2) {
        const uint64x2_t keep = vandq_u64(zero_bytes_mask(xm + t), zero_bytes_mask(ym + t));
        const float64x2_t raw = vsubq_f64(vld1q_f64(x + t), vld1q_f64(y + t));
        const float64x2_t diff =
            vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(raw), keep));
        acc = vfmaq_f64(acc, diff, diff);
        count += (vgetq_lane_u64(keep, 0) & 1U) + (vgetq_lane_u64(keep, 1) & 1U);
    }
    double total = vaddvq_f64(acc);
    for (; t < d; ++t) {
        if (xm[t] || ym[t]) continue;
        const double diff = x[t] - y[t];
        total += diff * diff;
        ++count;
    }
    *common = count;
    return total;
}

double weighted_abs_dev(const double* x, const double* y, const double* w,
                        const std::uint8_t* skip, std::size_t d) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t t = 0;
    for (; t + 2 <= d; t += 2) {
        const float64x2_t term =
            vmulq_f64(vabsq_f64(vsubq_f64(vld1q_f64(x + t), vld1q_f64(y + t))), vld1q_f64(w + t));
        const uint64x2_t kept = vandq_u64(vreinterpretq_u64_f64(term), zero_bytes_mask(skip + t));
        acc = vaddq_f64(acc, vreinterpretq_f64_u64(kept));
    }
    double total = vaddvq_f64(acc);
    for (; t < d; ++t)
        if (!skip[t]) total += std::fabs(x[t] - y[t]) * w[t];
    return total;
}

} // namespace

const KernelTable neon_table{Isa::neon, &matmul_nt, &masked_sq_dist, &weighted_abs_dev};

} // namespace qimpute::kernels::detail
