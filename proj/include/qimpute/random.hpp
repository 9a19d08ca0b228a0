#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qimpute {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a over the bytes of a label.
std::uint64_t hash_label(std::string_view label) noexcept;

// Stage seed derived from the master seed and a stable label, so adding a
// stage never shifts the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0) noexcept;

// Counter-based uniform draw in [0, 1); the same key always yields the same
// value regardless of evaluation order.
double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

// Sequential generator for the optimizers. The engine's output sequence is
// fixed by the standard; the conversions below are ours, so draws are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();                        // standard normal, Box-Muller
    std::size_t below(std::size_t n);       // uniform integer in [0, n)

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qimpute
