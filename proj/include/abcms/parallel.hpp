#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace abcms {

// Runs fn(i) for i in [0, count) on up to `threads` workers.
// Tasks must be independent and write only to their own output slots;
// results are then deterministic regardless of the thread count.
// The first exception thrown by any task is rethrown on the caller.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int nw = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(threads), count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    std::atomic<int> error_guard{0};
    for (int t = 0; t < nw; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    if (error_guard.fetch_add(1) == 0)
                        first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

} // namespace abcms
