#pragma once

#include <cstdint>
#include <random>

namespace nskd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded RNG. All randomness in the library flows through this wrapper so
/// that a run is reproducible bit-for-bit from its seed on any platform:
/// mt19937_64's output sequence is pinned by the standard, and the
/// real/integer mappings below avoid the implementation-defined std
/// distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    /// Independent substream identified by a label; derivation depends only
    /// on (seed, label), not on how much has been drawn from this stream.
    Rng stream(std::uint64_t label) const {
        std::uint64_t s = seed_ + 0x632be59bd9b4e019ULL * (label + 1);
        splitmix64(s);
        std::uint64_t t = s;
        return Rng(splitmix64(t));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n), unbiased.
    int uniform_int(int n) {
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return static_cast<int>(v % un);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace nskd
