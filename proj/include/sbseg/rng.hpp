#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sbseg {

/// Deterministic, platform-independent random number generation.
/// xoshiro256++ seeded through SplitMix64; normal variates via Box-Muller.
/// Streams derived from (seed, key...) tuples are independent for distinct
/// keys, which is what the per-(sequence, replicate) substream contracts rely on.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Collapse a (seed, key...) tuple into a single stream seed.
inline std::uint64_t stream_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x8f1bbcdcbfa53e0bULL;
    std::uint64_t out = 0;
    for (std::uint64_t part : parts) {
        state ^= part + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// Uniform/normal sampler over a xoshiro stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_.next(); }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n).
    int uniform_int(int n) {
        return static_cast<int>(engine_.next() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    Xoshiro256pp engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rng
} // namespace sbseg
