#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tsk {

// Resolve a user-facing thread count: 0 means "all hardware threads".
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(chunk_begin, chunk_end) over [0, count) split into fixed-size
// chunks. Chunk boundaries never depend on the worker count, so any body
// whose output for a chunk depends only on that chunk is reproducible
// bit-for-bit across thread counts. The first exception thrown by a worker
// is rethrown on the calling thread.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t chunk, unsigned threads, Body &&body) {
    if (count == 0) {
        return;
    }
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t num_chunks = (count + chunk - 1) / chunk;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), num_chunks));

    std::atomic<std::size_t> next{ 0 };
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= num_chunks) {
                return;
            }
            try {
                const std::size_t begin = c * chunk;
                body(begin, std::min(count, begin + chunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(num_chunks);
                return;
            }
        }
    };

    if (workers <= 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned t = 1; t < workers; ++t) {
            pool.emplace_back(run);
        }
        run();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace tsk
