#pragma once

#include <cstdint>
#include <random>

namespace uavsim {

/// SplitMix64 finalizer, used to derive independent substream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a substream seed from a base seed and a sequence of indices.
template <typename... Ix>
constexpr std::uint64_t derive_seed(std::uint64_t base, Ix... indices) noexcept
{
    std::uint64_t s = mix_seed(base);
    ((s = mix_seed(s ^ static_cast<std::uint64_t>(indices))), ...);
    return s;
}

/**
 * Seeded random stream. Uniform doubles are built from the top 53 bits of
 * the engine output so sequences are identical across standard libraries.
 */
class Rng
{
  public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }

    /// Uniform in [0, 1).
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    bool bernoulli(double p)
    {
        return uniform() < p;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace uavsim
