#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace trapion::detail {

/// Threads used for `work_items` items; `requested` = 0 means one per hardware thread.
inline unsigned worker_count(std::size_t work_items, unsigned requested = 0)
{
    const unsigned hw = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(1, work_items)));
}

/// Runs body(i) for i in [0, count) on a pool of threads. Items are dealt
/// round-robin; body must only write state owned by item i.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = 0)
{
    const unsigned workers = worker_count(count, threads);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers)
                    body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace trapion::detail
