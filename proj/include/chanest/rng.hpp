#pragma once

#include <cmath>
#include <cstdint>

#include "chanest/types.hpp"

namespace chanest {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/** Deterministic 64-bit mix of a master seed and a counter index. */
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(master, a), b);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    return mix_seed(mix_seed(master, a, b), c);
}

/**
 * Self-contained xoshiro256** generator with portable uniform/normal draws.
 * Output streams depend only on the seed, not on the standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x = splitmix64(x);
            word = x;
        }
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /** Uniform in [0, 1) with 53-bit resolution. */
    scalar_t uniform() { return static_cast<scalar_t>(next_u64() >> 11) * 0x1.0p-53; }

    scalar_t uniform(scalar_t lo, scalar_t hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    bool bit() { return (next_u64() >> 63) != 0; }

    /** Standard normal via Box-Muller. */
    scalar_t normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // uniform in (0, 1] so the log is finite
        const scalar_t u1 = (static_cast<scalar_t>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const scalar_t u2 = uniform();
        const scalar_t r = std::sqrt(-2.0 * std::log(u1));
        const scalar_t a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /** Circularly-symmetric complex normal with E{|x|^2} = var. */
    cx_t cnormal(scalar_t var) {
        const scalar_t s = std::sqrt(var * 0.5);
        return {s * normal(), s * normal()};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    bool has_spare_;
    scalar_t spare_;
};

}  // namespace chanest
