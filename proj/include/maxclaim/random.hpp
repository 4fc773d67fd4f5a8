#pragma once

#include <cstdint>
#include <random>

namespace maxclaim {

using Engine = std::mt19937_64;

// A reproducible substream: (master seed, stream index) always maps to the
// same engine state, and distinct indices give unrelated states.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    Engine engine() const
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          0x6d61u, 0x78636cu};
        return Engine(seq);
    }

    SeededStream child(std::uint64_t i) const { return {seed, index * 0x9E3779B97F4A7C15ULL + i + 1}; }
};

// Uniform on the open interval (0,1) with 53 random bits.
inline double uniform_open(Engine& rng)
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace maxclaim
