#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace dibs {

/// Run fn(i) for i in [0, count) on up to `jobs` threads. Work items must be
/// independent; callers index results so output is order-invariant.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = std::min(jobs, count);
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
}

}  // namespace dibs
