#pragma once

// Arithmetic inner loops shared by the PCA, rotation, KNN and cost stages.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2/FMA (x86-64) or NEON (AArch64) variant. The variant is
// chosen once at startup from the running CPU and can be overridden, which the
// equivalence tests use to compare every available variant against scalar.
//
// Variants agree to rounding, not bit for bit: the vector paths use fused
// multiply-add and a different summation order. Results are deterministic for
// a given binary on a given machine.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qimpute::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

// Raw kernel signatures. Masks hold 1 for a missing coordinate, 0 otherwise.
struct KernelTable {
    Isa isa;
    // out[n x m] = a[n x k] * b[m x k]^T
    void (*matmul_nt)(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m);
    // sum of (x - y)^2 over coordinates present in both rows; *common gets
    // the number of such coordinates
    double (*masked_sq_dist)(const double* x, const double* y,
                             const std::uint8_t* x_missing, const std::uint8_t* y_missing,
                             std::size_t d, std::size_t* common);
    // sum of |x - y| * weight over coordinates with skip == 0
    double (*weighted_abs_dev)(const double* x, const double* y, const double* weight,
                               const std::uint8_t* skip, std::size_t d);
};

bool supported(Isa isa) noexcept;
Isa detect() noexcept;                      // best variant for this CPU
std::vector<Isa> available();               // scalar first
const KernelTable& table(Isa isa);          // throws Error when unsupported
const KernelTable& active() noexcept;
void set_active(Isa isa);                   // throws Error when unsupported

// Checked span front-ends over the active table.

// out = a * b^T where a is n x k and b is m x k, all row-major.
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> out,
               std::size_t n, std::size_t k, std::size_t m);

double masked_sq_dist(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> x_missing, std::span<const std::uint8_t> y_missing,
                      std::size_t& common);

double weighted_abs_dev(std::span<const double> x, std::span<const double> y,
                        std::span<const double> weight, std::span<const std::uint8_t> skip);

namespace detail {
extern const KernelTable scalar_table;
#if defined(QIMPUTE_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(QIMPUTE_HAVE_NEON)
extern const KernelTable neon_table;
#endif
} // namespace detail

} // namespace qimpute::kernels
