#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace pairspin {

// Process-wide worker cap, set once by the CLI --threads flag.
inline int& max_threads_setting() {
    static int value = 0;  // 0 = hardware concurrency
    return value;
}

inline void set_max_threads(int n) { max_threads_setting() = n; }

inline int effective_threads(std::size_t n_items) {
    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int cap = max_threads_setting() > 0 ? max_threads_setting() : hw;
    if (std::size_t(cap) > n_items) cap = int(n_items);
    return cap < 1 ? 1 : cap;
}

// Runs f(i) for i in [0, n). Each index must write only to its own output
// slot; combined with derive_seed this makes results independent of the
// thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    if (n == 0) return;
    const int workers = effective_threads(n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace pairspin
