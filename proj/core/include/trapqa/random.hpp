#pragma once

// Counter-based generator: every stream is a pure function of (seed, counter),
// so chip k of a wafer can draw its faults without touching any other chip.

#include <cstdint>
#include <limits>

namespace trapqa {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
    return splitmix64(seed ^ splitmix64(key + 0x632be59bd9b4e019ULL));
}

/// UniformRandomBitGenerator over splitmix64(seed + counter).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    /// Uniform double in [0, 1) from the top 53 bits; avoids the
    /// implementation-defined std::uniform_real_distribution.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace trapqa
