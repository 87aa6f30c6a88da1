#pragma once

#include <cstdint>
#include <random>

namespace symdyn::detail {

// Platform-independent draws on top of mt19937_64, whose output sequence
// is fixed by the standard.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = rng();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
}

inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace symdyn::detail
