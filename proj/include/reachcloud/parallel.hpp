#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace reachcloud {

/// Worker count: REACHCLOUD_WORKERS if set, else hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("REACHCLOUD_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(begin, end) over a contiguous partition of [0, n). The partition
/// depends only on (n, workers) and outputs are written by index, so results
/// are identical for any worker count.
template <typename F>
void parallel_chunks(std::int64_t n, int workers, F&& f) {
    if (n <= 0) return;
    if (workers < 1) workers = 1;
    if (workers == 1 || n < 2 * workers) {
        f(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::int64_t b = n * w / workers;
        const std::int64_t e = n * (w + 1) / workers;
        if (b == e) continue;
        threads.emplace_back([&f, b, e] { f(b, e); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace reachcloud
