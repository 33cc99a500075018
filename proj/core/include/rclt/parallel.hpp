#ifndef RCLT_PARALLEL_HPP
#define RCLT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace rclt {

// Process-wide default worker count, settable from the CLI (--threads).
inline int& default_thread_count() {
    static int count = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return count;
}

// Runs fn(block_index, begin, end) over fixed-size blocks of [0, count).
// The block partition depends only on `count` and `block_size`, never on the
// worker count, so per-block results can be merged in block order to give
// schedule-independent reductions.
inline void parallel_for_blocks(std::int64_t count, std::int64_t block_size,
                                const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn,
                                int threads = 0) {
    if (count <= 0) return;
    if (block_size <= 0) block_size = 1;
    const std::int64_t n_blocks = (count + block_size - 1) / block_size;
    if (threads <= 0) threads = default_thread_count();
    threads = static_cast<int>(std::min<std::int64_t>(threads, n_blocks));

    if (threads <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(count, lo + block_size);
            fn(b, lo, hi);
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
                if (b >= n_blocks) return;
                const std::int64_t lo = b * block_size;
                const std::int64_t hi = std::min(count, lo + block_size);
                fn(b, lo, hi);
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline std::int64_t block_count(std::int64_t count, std::int64_t block_size) {
    if (count <= 0) return 0;
    return (count + block_size - 1) / block_size;
}

}  // namespace rclt

#endif
