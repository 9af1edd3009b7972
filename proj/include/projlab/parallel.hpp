#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace projlab {

// Runs `work(chunk, begin, end)` over a fixed partition of [0, n) into
// `chunks` pieces. The partition never depends on the thread count, so any
// per-chunk results (and per-chunk RNG substreams) are schedule-independent;
// callers combine the chunk results in index order.
inline void forEachChunk(std::int64_t n, int chunks,
                         const std::function<void(int, std::int64_t, std::int64_t)>& work) {
    if (n <= 0 || chunks <= 0) return;
    if (chunks > n) chunks = static_cast<int>(n);
    const std::int64_t base = n / chunks;
    const std::int64_t extra = n % chunks;
    auto bounds = [&](int c) {
        const std::int64_t lo = c * base + std::min<std::int64_t>(c, extra);
        const std::int64_t hi = lo + base + (c < extra ? 1 : 0);
        return std::pair<std::int64_t, std::int64_t>(lo, hi);
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || chunks == 1) {
        for (int c = 0; c < chunks; ++c) {
            auto [lo, hi] = bounds(c);
            work(c, lo, hi);
        }
        return;
    }

    std::atomic<int> next{0};
    auto runner = [&] {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= chunks) return;
            auto [lo, hi] = bounds(c);
            work(c, lo, hi);
        }
    };
    const unsigned nthreads = std::min<unsigned>(hw, static_cast<unsigned>(chunks));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(runner);
    for (auto& t : pool) t.join();
}

}  // namespace projlab
