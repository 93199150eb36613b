#pragma once

// Seeded random streams.
//
// xoshiro256++ engines seeded through splitmix64, with derived per-index
// streams so that simulations are reproducible and independent of how
// work is sharded across threads: the stream for path i depends only on
// (master_seed, i), never on which shard draws it.

#include <array>
#include <cstdint>

namespace patchvar {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

using Rng = Xoshiro256pp;

// Deterministic sub-stream for a given (master seed, index) pair.
inline Rng derived_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t mixed = master_seed
        ^ (index * 0x9E3779B97F4A7C15ULL)
        ^ 0xD1B54A32D192ED03ULL;
    return Rng(mixed);
}

} // namespace patchvar
