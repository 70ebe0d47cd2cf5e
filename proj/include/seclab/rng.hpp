#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace seclab {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of `master`. Mixing is order-sensitive, so
/// derive_seed(derive_seed(s, a), b) and derive_seed(derive_seed(s, b), a) differ.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
    return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Fixed stream identifiers so that every component draws from its own sequence.
namespace streams {
inline constexpr std::uint64_t kCodebook = 1;
inline constexpr std::uint64_t kPreselect = 2;
inline constexpr std::uint64_t kEncoder = 3;
inline constexpr std::uint64_t kChannel = 4;
inline constexpr std::uint64_t kMessages = 5;
inline constexpr std::uint64_t kOccupancy = 6;
inline constexpr std::uint64_t kSearch = 7;
inline constexpr std::uint64_t kDraw = 8;
} // namespace streams

/// Portable wrapper over mt19937_64. Only the raw engine output is used so
/// results do not depend on the standard library's distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return r % bound;
    }

    /// Inverse-CDF draw from a probability vector (need not be normalized
    /// beyond rounding). Zero-probability entries are never returned.
    std::size_t categorical(std::span<const double> probs)
    {
        const double u = uniform01();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            if (probs[k] <= 0.0) continue;
            acc += probs[k];
            last = k;
            if (u < acc) return k;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace seclab
