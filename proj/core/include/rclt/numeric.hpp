#ifndef RCLT_NUMERIC_HPP
#define RCLT_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

namespace rclt {

// Pairwise tree sum with power-of-two split points. The association depends
// only on element count, so partial sums over 2^k-aligned chunks are exact
// subtrees of the full reduction; summing such chunk totals reproduces the
// full-series total bit for bit.
inline double tree_sum(const double* x, std::int64_t count) {
    if (count <= 0) return 0.0;
    if (count == 1) return x[0];
    if (count == 2) return x[0] + x[1];
    std::int64_t half = 1;
    while (half * 2 < count) half *= 2;
    return tree_sum(x, half) + tree_sum(x + half, count - half);
}

inline double tree_sum(std::span<const double> x) { return tree_sum(x.data(), static_cast<std::int64_t>(x.size())); }

// Strided variant used for coordinate slices of interleaved series data.
inline double tree_sum_strided(const double* x, std::int64_t count, std::int64_t stride) {
    if (count <= 0) return 0.0;
    if (count == 1) return x[0];
    if (count == 2) return x[0] + x[stride];
    std::int64_t half = 1;
    while (half * 2 < count) half *= 2;
    return tree_sum_strided(x, half, stride) + tree_sum_strided(x + half * stride, count - half, stride);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Order-statistic quantile at rank ceil(prob*count) (no interpolation), so a
// strictly increasing coordinate map commutes with quantile extraction.
inline double order_stat_quantile(std::vector<double> sorted, double prob) {
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    if (n == 0) return 0.0;
    std::int64_t k = static_cast<std::int64_t>(std::ceil(prob * static_cast<double>(n)));
    k = std::clamp<std::int64_t>(k, 1, n);
    return sorted[static_cast<std::size_t>(k - 1)];
}

// FNV-1a, used for content digests of process specs.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a(s.data(), s.size(), seed);
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t seed) {
    unsigned char buf[8];
    std::memcpy(buf, &v, 8);
    return fnv1a(buf, 8, seed);
}

inline std::uint64_t fnv1a_f64(double v, std::uint64_t seed) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    return fnv1a_u64(bits, seed);
}

}  // namespace rclt

#endif
