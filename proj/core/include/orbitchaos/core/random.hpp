#pragma once

#include <cstdint>
#include <limits>

namespace orbitchaos {

// Seed hierarchy
// --------------
// Every stochastic estimator takes one 64-bit master seed. Sample number i of
// a run draws all of its randomness from SampleStream(derive_seed(master, i)),
// so an estimate is a pure function of (inputs, master seed) no matter how the
// samples are grouped into batches or how many worker threads run them.
// Auxiliary streams that belong to the same sample (for example the random
// permutation of an orbit tuple) use derive_seed(sample_seed, tag).

/// SplitMix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Splitting function (seed, stream index) -> child seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (stream * 0xd1342543de82ef95ULL + 1));
}

/// SplitMix64 generator. Satisfies std::uniform_random_bit_generator, so it
/// can drive the standard distributions. Its single-word state makes it cheap
/// to instantiate once per Monte Carlo sample.
class SampleStream {
public:
    using result_type = std::uint64_t;

    explicit constexpr SampleStream(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// Uniform double on the grid {0, 2^-53, ..., 1 - 2^-53}; never returns 1.
inline double uniform01(SampleStream& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 uint128_t;

/// Uniform integer in [0, bound), bound >= 1, without modulo bias
/// (Lemire's multiply-and-reject method).
inline std::uint64_t uniform_index(SampleStream& rng, std::uint64_t bound) noexcept {
    uint128_t m = static_cast<uint128_t>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<uint128_t>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Stream for sample `index` of a run seeded with `master`.
inline SampleStream sample_stream(std::uint64_t master, std::uint64_t index) noexcept {
    return SampleStream(derive_seed(master, index));
}

}  // namespace orbitchaos
