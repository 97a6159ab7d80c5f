#pragma once

#include <cstdint>

namespace spikelab {

/// SplitMix64 finalizer. Good avalanche, cheap, and stateless.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

/// Combine a seed with a sub-stream label into a fresh 64-bit seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
    return mix64(seed + 0x9e3779b97f4a7c15ULL * (label + 1));
}

/// Counter-based random stream: the value at a given index is a pure
/// function of (seed, stream, index), so parallel generation is
/// schedule-independent and bit-reproducible across runs.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::uint64_t bits(std::uint64_t index, std::uint64_t salt = 0) const {
        std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
        h = mix64(h + 0x9e3779b97f4a7c15ULL * index);
        if (salt != 0) h = mix64(h + 0xd1b54a32d192ed03ULL * salt);
        return h;
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform(std::uint64_t index, std::uint64_t salt = 0) const {
        return (static_cast<double>(bits(index, salt) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, cosine branch).
    double normal(std::uint64_t index) const;
};

}  // namespace spikelab
