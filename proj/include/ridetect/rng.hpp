#pragma once

#include <cstdint>

namespace ridetect {

/// splitmix64 finalizer. Derives independent child seeds (per ensemble
/// member, per run) from one master seed without correlated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Salt separating the shuffle stream from the init stream inside one run.
inline constexpr std::uint64_t kShuffleSalt = 0x517cc1b727220a95ULL;

}  // namespace ridetect
