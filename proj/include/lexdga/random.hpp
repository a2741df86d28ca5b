#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace lexdga {

/// SplitMix64. All sampling in the library goes through this.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t operator()() noexcept { return next(); }
    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Independent stream seed for sub-task `index` of a run seeded with `seed`.
/// Depends only on (seed, index), never on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return mix.next();
}

/// Fisher-Yates, drawing j uniformly in [0, i] for i = n-1 .. 1.
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// `n` indices drawn uniformly with replacement from [0, n).
inline std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::size_t> out(n);
    for (auto& idx : out) idx = static_cast<std::size_t>(rng.below(n));
    return out;
}

}  // namespace lexdga
