#pragma once

// Seeding helpers for reproducible parallel Monte Carlo.
//
// Every random stream is keyed by (seed, stream, index): the stream tag
// separates unrelated consumers (noise samples, RB sequences, readout traces)
// and the index is the work item. Workers never share a generator, so results
// do not depend on how OpenMP schedules the loop.

#include <cstdint>
#include <random>

namespace siq {

inline constexpr std::uint64_t kDefaultSeed = 20180126;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

namespace stream {
inline constexpr std::uint64_t kQuasiStatic = 0x51;
inline constexpr std::uint64_t kRbSequence = 0x52;
inline constexpr std::uint64_t kReadoutTrace = 0x53;
inline constexpr std::uint64_t kReadoutNoise = 0x54;
inline constexpr std::uint64_t kFitNoise = 0x55;
inline constexpr std::uint64_t kMisinit = 0x56;
}  // namespace stream

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Rng(derive_seed(seed, stream, index));
}

}  // namespace siq
