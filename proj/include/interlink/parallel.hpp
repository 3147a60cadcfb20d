#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace interlink {

// Worker cap: hardware concurrency, optionally limited by INTERLINK_THREADS.
inline unsigned max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("INTERLINK_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return hw;
}

// Index-parallel loop; callers keep results in per-index slots so that the
// merged output is identical for serial and parallel runs.
template <class F>
void parallel_for_workers(std::size_t count, unsigned workers, F&& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

template <class F>
void parallel_for(std::size_t count, F&& body) {
    parallel_for_workers(count, max_threads(), std::forward<F>(body));
}

} // namespace interlink
