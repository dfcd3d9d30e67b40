#pragma once

#include <cstdint>

namespace ucplab {

/// SplitMix64 finaliser; the seed-derivation scheme recorded in every output header.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of task `index` under root seed `root`.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
    return splitmix64(root ^ splitmix64(index));
}

inline constexpr const char* kSeedScheme = "splitmix64(root ^ splitmix64(index))";

}  // namespace ucplab
