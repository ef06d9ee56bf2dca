#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ppmix {

/// SplitMix64 step; used to derive independent child seeds from one master
/// seed so that every stage of a run is reproducible in isolation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Mixes a base seed with a list of salts (stage tags, grid indices, ...).
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> salts) {
    std::uint64_t s = splitmix64(base);
    for (std::uint64_t salt : salts) s = splitmix64(s ^ salt);
    return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace ppmix
