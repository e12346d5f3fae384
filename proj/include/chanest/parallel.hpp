#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chanest {

/** Process-wide worker-thread cap, settable from the CLI. */
int& thread_count();

/**
 * Runs fn(block_index, lo, hi) over [0, n) split into fixed-size blocks.
 * Block boundaries depend only on (n, block); callers that write one result
 * slot per block and reduce the slots in block order get results that are
 * independent of the number of worker threads.
 */
template <typename Fn>
void parallel_blocks(std::int64_t n, std::int64_t block, Fn&& fn) {
    if (n <= 0) return;
    if (block < 1) block = 1;
    const std::int64_t n_blocks = (n + block - 1) / block;
    int workers = thread_count();
    if (workers > n_blocks) workers = static_cast<int>(n_blocks);
    if (workers <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            const std::int64_t lo = b * block;
            const std::int64_t hi = std::min(n, lo + block);
            fn(b, lo, hi);
        }
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        try {
            for (;;) {
                const std::int64_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                const std::int64_t lo = b * block;
                const std::int64_t hi = std::min(n, lo + block);
                fn(b, lo, hi);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 0; t < workers - 1; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline std::int64_t block_count(std::int64_t n, std::int64_t block) {
    return n <= 0 ? 0 : (n + block - 1) / block;
}

}  // namespace chanest
