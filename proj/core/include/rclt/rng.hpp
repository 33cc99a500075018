#ifndef RCLT_RNG_HPP
#define RCLT_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "rclt/numeric.hpp"

namespace rclt {

// Philox-4x32-10 counter-based generator. Draws are a pure function of
// (key, counter), so sampling is reproducible regardless of how replicates
// are scheduled across worker threads.
struct PhiloxKey {
    std::uint32_t k0 = 0;
    std::uint32_t k1 = 0;
};

struct PhiloxCounter {
    std::uint32_t c0 = 0;  // replicate
    std::uint32_t c1 = 0;  // time / row index
    std::uint32_t c2 = 0;  // coordinate
    std::uint32_t c3 = 0;  // draw / attempt
};

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * ctr[0];
    const std::uint64_t p1 = M1 * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97f4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(PhiloxKey key, PhiloxCounter counter) {
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    std::array<std::uint32_t, 4> ctr = {counter.c0, counter.c1, counter.c2, counter.c3};
    std::uint32_t k0 = key.k0;
    std::uint32_t k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(ctr, k0, k1);
        k0 += W0;
        k1 += W1;
    }
    return ctr;
}

// Stream purposes keep independent uses of the same user seed disjoint.
enum class Stream : std::uint32_t {
    innovations = 1,
    coupling = 2,
    marginal_moments = 3,
    blur = 4,
    conditioning = 5,
    conditional_cloud = 6,
    test_oracle = 7,
};

inline PhiloxKey derive_key(std::uint64_t seed, Stream stream, std::uint64_t salt = 0) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(stream) * 0x9E3779B97f4A7C15ull));
    h = detail::splitmix64(h ^ salt);
    return PhiloxKey{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

// Uniform in (0, 1] from 64 bits; the open-at-zero side keeps log() finite.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

struct UniformPair {
    double u1;
    double u2;
};

inline UniformPair uniform_pair(PhiloxKey key, PhiloxCounter ctr) {
    const auto w = philox4x32(key, ctr);
    return {to_unit_open(w[0], w[1]), to_unit_open(w[2], w[3])};
}

// One standard normal per counter via Box-Muller (cosine branch).
inline double normal_draw(PhiloxKey key, PhiloxCounter ctr) {
    const auto [u1, u2] = uniform_pair(key, ctr);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double normal_draw(PhiloxKey key, std::uint32_t rep, std::uint32_t idx, std::uint32_t coord,
                          std::uint32_t draw = 0) {
    return normal_draw(key, PhiloxCounter{rep, idx, coord, draw});
}

// Student-t via Bailey's polar method. Rejection attempts advance only the
// counter's draw word, so each logical index owns a private substream and
// the output stays schedule independent.
inline double student_t_draw(PhiloxKey key, std::uint32_t rep, std::uint32_t idx, std::uint32_t coord, double df) {
    for (std::uint32_t attempt = 0;; ++attempt) {
        const auto [u1, u2] = uniform_pair(key, PhiloxCounter{rep, idx, coord, attempt});
        const double u = 2.0 * u1 - 1.0;
        const double v = 2.0 * u2 - 1.0;
        const double w = u * u + v * v;
        if (w > 0.0 && w <= 1.0) {
            return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
        }
    }
}

}  // namespace rclt

#endif
