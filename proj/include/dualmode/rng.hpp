#pragma once

#include <cmath>
#include <cstdint>

namespace dualmode {

/// splitmix64 step. Used to expand seeds into generator state and to derive
/// independent stream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes (seed, index) into a decorrelated 64-bit key. Lets sweep runners
/// give every point its own seed independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return splitmix64(state);
}

/// xoshiro256++ (Blackman and Vigna, public domain). State is expanded from
/// (seed, stream) via splitmix64, so distinct streams of the same seed are
/// independent; sampling uses fixed bit-level mappings to keep simulation
/// runs bit-identical across platforms and compilers.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        for (auto& word : s_) word = splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
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

    /// Uniform draw strictly inside (0, 1): 53-bit mantissa plus half an ulp.
    double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Exponential draw by inverse transform; uniform01 never returns 0, so
    /// the logarithm is always finite.
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace dualmode
