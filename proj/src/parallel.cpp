#include "spraygrid/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace spraygrid {

namespace {
std::atomic<int> g_thread_cap{4};
}

int thread_cap() { return g_thread_cap.load(); }

void set_thread_cap(int n) { g_thread_cap.store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
    if (threads <= 0) threads = thread_cap();
    threads = static_cast<int>(std::min<std::size_t>(threads, n));
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    // Static contiguous partition; slot ownership makes order irrelevant.
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = chunk * static_cast<std::size_t>(t);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace spraygrid
