#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nmgauss {

inline unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on `threads` workers
// (0 = hardware count). The chunk decomposition is fixed by the caller, each
// chunk writes only to its own output slot, and callers fold the slots
// sequentially by index, so results are bitwise independent of the thread
// count and of scheduling.
template <typename Fn>
void parallel_chunks(std::size_t n_chunks, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = hardware_threads();
    if (n_chunks == 0) return;
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    if (threads > n_chunks) threads = static_cast<unsigned>(n_chunks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_chunks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n_chunks, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace nmgauss
