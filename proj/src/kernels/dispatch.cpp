#include "qimpute/errors.hpp"
#include "qimpute/kernels.hpp"

#include <atomic>
#include <string>

namespace qimpute::kernels {

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(QIMPUTE_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::neon:
#if defined(QIMPUTE_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detect() noexcept {
    if (supported(Isa::avx2)) return Isa::avx2;
    if (supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::scalar};
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (supported(isa)) out.push_back(isa);
    return out;
}

const KernelTable& table(Isa isa) {
    if (!supported(isa)) throw Error("kernel variant '" + std::string(isa_name(isa)) + "' is not supported on this CPU");
    switch (isa) {
#if defined(QIMPUTE_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table;
#endif
#if defined(QIMPUTE_HAVE_NEON)
    case Isa::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
    }
}

namespace {
std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{&table(detect())};
    return slot;
}
} // namespace

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> out,
               std::size_t n, std::size_t k, std::size_t m) {
    if (a.size() != n * k || b.size() != m * k || out.size() != n * m)
        throw Error("matmul_nt: operand sizes do not match the stated shapes");
    if (n == 0 || m == 0) return;
    active().matmul_nt(a.data(), b.data(), out.data(), n, k, m);
}

double masked_sq_dist(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> x_missing, std::span<const std::uint8_t> y_missing,
                      std::size_t& common) {
    const std::size_t d = x.size();
    if (y.size() != d || x_missing.size() != d || y_missing.size() != d)
        throw Error("masked_sq_dist: length mismatch");
    return active().masked_sq_dist(x.data(), y.data(), x_missing.data(), y_missing.data(), d, &common);
}

double weighted_abs_dev(std::span<const double> x, std::span<const double> y,
                        std::span<const double> weight, std::span<const std::uint8_t> skip) {
    const std::size_t d = x.size();
    if (y.size() != d || weight.size() != d || skip.size() != d)
        throw Error("weighted_abs_dev: length mismatch");
    return active().weighted_abs_dev(x.data(), y.data(), weight.data(), skip.data(), d);
}

} // namespace qimpute::kernels
