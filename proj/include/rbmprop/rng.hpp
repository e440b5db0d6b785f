#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rbmprop {

// splitmix64 step; also used to derive stream seeds from arbitrary integers.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable hash of a seed plus task coordinates, so every task owns an
// order-independent stream (identical output under any scheduling).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t p : parts) {
        h ^= p;
        (void)splitmix64(h);
    }
    return splitmix64(h);
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
// Self-contained so that every draw is bit-reproducible across platforms,
// unlike the unspecified std::normal_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64()
    {
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

    // uniform in [0, 1) with 53 random bits
    double uniform()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one spare kept between calls.
    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n)
    {
        return next_u64() % n;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rbmprop
