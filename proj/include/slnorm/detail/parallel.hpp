#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slnorm::detail {

// Worker count: explicit request wins, then the SLNORM_WORKERS environment
// variable, then the hardware concurrency.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SLNORM_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(i) for i in [0, count).  Each index owns its output slot, so the
// result is independent of scheduling.  The first exception thrown by any
// worker is rethrown on the calling thread after all workers finish.
template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> bail{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || bail.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                bail.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace slnorm::detail
