#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace pcsim {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Named stream splitter: every (root, stream, indices...) tuple maps to an
/// independent seed, so extending one stream never perturbs another.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                 std::initializer_list<std::uint64_t> indices = {}) noexcept {
    std::uint64_t s = mix64(root ^ mix64(fnv1a64(stream)));
    for (auto i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
    return s;
}

using Engine = std::mt19937_64;

// The std distributions are implementation-defined; these transforms are not,
// which keeps generated scenarios bit-identical across standard libraries.

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Uniform integer in [0, n) for n >= 1.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

}  // namespace pcsim
