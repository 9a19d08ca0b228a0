// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "qimpute/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace qimpute::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    const __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
}

// all-ones lanes where the four bytes at p are zero
inline __m256d zero_bytes_mask(const std::uint8_t* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, sizeof bits);
    const __m256i lanes = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(bits)));
    return _mm256_castsi256_pd(_mm256_cmpeq_epi64(lanes, _mm256_setzero_si256()));
}

inline double dot(const double* a, const double* b, std::size_t k) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 8 <= k; t += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + t + 4), _mm256_loadu_pd(b + t + 4), acc1);
    }
    if (t + 4 <= k) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t), acc0);
        t += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; t < k; ++t) acc += a[t] * b[t];
    return acc;
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * k;
        double* oi = out + i * m;
        for (std::size_t j = 0; j < m; ++j) oi[j] = dot(ai, b + j * k, k);
    }
}

double masked_sq_dist(const double* x, const double* y,
                      const std::uint8_t* xm, const std::uint8_t* ym,
                      std::size_t d, std::size_t* common) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t count = 0;
    std::size_t t = 0;
    for (; t + 4 <= d; t += 4) {
        const __m256d keep = _mm256_and_pd(zero_bytes_mask(xm + t), zero_bytes_mask(ym + t));
        const __m256d diff =
            _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(x + t), _mm256_loadu_pd(y + t)), keep);
        acc = _mm256_fmadd_pd(diff, diff, acc);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(keep)));
    }
    double total = hsum(acc);
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
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 4 <= d; t += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(x + t), _mm256_loadu_pd(y + t));
        const __m256d term = _mm256_mul_pd(_mm256_andnot_pd(sign, diff), _mm256_loadu_pd(w + t));
        acc = _mm256_add_pd(acc, _mm256_and_pd(term, zero_bytes_mask(skip + t)));
    }
    double total = hsum(acc);
    for (; t < d; ++t)
        if (!skip[t]) total += std::fabs(x[t] - y[t]) * w[t];
    return total;
}

} // namespace

const KernelTable avx2_table{Isa::avx2, &matmul_nt, &masked_sq_dist, &weighted_abs_dev};

} // namespace qimpute::kernels::detail
