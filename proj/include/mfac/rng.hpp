#pragma once

/// Counter-based random streams.
///
/// Every stream is a (key, counter) pair fed through the SplitMix64 finalizer,
/// so a stream's full state is two integers. That makes checkpointing exact
/// and lets Langevin chains derive independent per-particle substreams from
/// (seed, step, population, particle) without any shared generator.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace mfac {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Folds a list of identifiers into a single stream key.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id));
    return h;
}

class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    std::uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

    /// Uniform on (0, 1].
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes exactly two u64 draws.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace mfac
