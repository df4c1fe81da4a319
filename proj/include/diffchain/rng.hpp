#pragma once

#include <cstdint>

namespace diffchain {

// Identifier of the random generation scheme, recorded in output metadata so
// runs are reproducible and self-describing.
inline constexpr const char* kGeneratorId = "mt19937_64/splitmix64-streams";

// splitmix64 finalizer (Vigna). Used to derive independent substream seeds
// from a master seed, so parallel blocks get decorrelated streams without
// sharing generator state.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64_mix(master + (stream + 1) * 0x9e3779b97f4a7c15ull);
}

// Uniform double in [0,1) from the top 53 bits; pinned bit pattern so results
// do not depend on the platform's distribution implementation.
template <typename Engine>
double uniform_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace diffchain
