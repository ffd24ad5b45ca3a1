#pragma once

#include <cstdint>
#include <random>

namespace nvq {

/// Generator used by every sampling routine; reports cite this name.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

/// Uniform double in [0,1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw from weights that sum to one. Falls back to the last
/// positive weight when rounding leaves the cumulative sum short of `u`.
template <typename Weights, typename WeightOf>
std::ptrdiff_t sample_categorical(Rng& rng, const Weights& items, WeightOf weight_of) {
    const double u = uniform01(rng);
    double acc = 0.0;
    std::ptrdiff_t last_positive = -1;
    std::ptrdiff_t i = 0;
    for (const auto& item : items) {
        const double w = weight_of(item);
        if (w > 0.0) {
            last_positive = i;
            acc += w;
            if (u < acc) return i;
        }
        ++i;
    }
    return last_positive;
}

/// Uniform integer in [0, n).
inline std::ptrdiff_t uniform_index(Rng& rng, std::ptrdiff_t n) {
    return static_cast<std::ptrdiff_t>(uniform01(rng) * static_cast<double>(n));
}

}  // namespace nvq
