#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <algorithm>
#include <mutex>
#include <thread>
#include <vector>

namespace nearcrit {

// Worker count: NEARCRIT_THREADS if set, else the hardware concurrency.
inline unsigned default_workers() {
    if (const char* s = std::getenv("NEARCRIT_THREADS")) {
        long v = std::strtol(s, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Calls body(i) for i in [0, n). Each index is handled by exactly one worker
// and results are expected to be written to slot i, so the output never
// depends on the worker count. Rethrows the first exception.
// make_state() builds per-worker scratch passed as body(state, i).
template <class MakeState, class Body>
void parallel_for_state(std::size_t n, MakeState&& make_state, Body&& body, unsigned workers = 0) {
    if (workers == 0) workers = default_workers();
    if (workers <= 1 || n <= 1) {
        auto state = make_state();
        for (std::size_t i = 0; i < n; ++i) body(state, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        auto state = make_state();
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(state, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned k = unsigned(std::min<std::size_t>(workers, n));
    for (unsigned t = 0; t + 1 < k; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = 0) {
    parallel_for_state(
        n, [] { return 0; }, [&](int&, std::size_t i) { body(i); }, workers);
}

} // namespace nearcrit
