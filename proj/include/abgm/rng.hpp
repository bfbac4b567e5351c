#pragma once

#include <cstdint>

namespace abgm {

// SplitMix64 (Steele, Lea, Flood 2014). State advances by the golden-ratio
// increment; output is the standard 30/27/31 xor-shift-multiply finalizer.
// Streams are identical on every platform for a given seed.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform integer in [0, bound). Uses the multiply-high reduction so the
    // result does not depend on the standard library's distributions.
    constexpr std::uint32_t below(std::uint32_t bound) noexcept {
        const std::uint64_t r = (*this)() >> 32;
        return static_cast<std::uint32_t>((r * bound) >> 32);
    }

    // True with probability percent/100.
    constexpr bool chance(std::uint32_t percent) noexcept { return below(100) < percent; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Seed for round `index` of a match seeded with `match_seed`.
constexpr std::uint64_t derive_seed(std::uint64_t match_seed, std::uint64_t index) noexcept {
    return SplitMix64::mix(match_seed ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ull));
}

} // namespace abgm
